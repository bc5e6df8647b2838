#include "tpbsim/cli.hpp"

int main(int argc, char** argv) { return tpb::cli_main(argc, argv); }
