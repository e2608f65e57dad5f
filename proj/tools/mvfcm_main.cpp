#include "mvfcm/cli.hpp"

int main(int argc, char** argv) { return mvfcm::cli::run(argc, argv); }
