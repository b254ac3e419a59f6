#include "primepoint/cli.hpp"

int main(int argc, char** argv) { return primepoint::cli::run(argc, argv); }
