#include "encounterlens/cli.hpp"

int main(int argc, char** argv) { return encounterlens::run_cli(argc, argv); }
