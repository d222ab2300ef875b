#include "gm/cli.hpp"

int main(int argc, char** argv) { return gm::cli::dispatch(argc, argv); }
