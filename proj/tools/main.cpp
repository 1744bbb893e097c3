#include "cli.hpp"

int main(int argc, char** argv) { return mfd::cli::run_main(argc, argv); }
