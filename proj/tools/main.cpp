#include "badapprox/cli.hpp"

int main(int argc, char** argv) { return badapprox::cli::run(argc, argv); }
