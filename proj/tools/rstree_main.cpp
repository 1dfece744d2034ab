#include "recourse/cli.hpp"

int main(int argc, char** argv) { return recourse::run_cli(argc, argv); }
