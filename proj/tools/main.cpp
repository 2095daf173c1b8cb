#include "cli_app.hpp"

int main(int argc, char** argv) { return rcext_cli::run_cli(argc, argv); }
