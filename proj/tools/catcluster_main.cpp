#include "catcluster/cli.hpp"

int main(int argc, char** argv) { return catcluster::cli::run(argc, argv); }
