#include "bores_cli/app.hpp"

int main(int argc, char** argv) { return bores::cli::run_cli(argc, argv); }
