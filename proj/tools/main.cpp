#include "sil/cli.hpp"

int main(int argc, char** argv) { return sil::cli::cli_main(argc, argv); }
