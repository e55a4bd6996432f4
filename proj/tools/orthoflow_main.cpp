#include "orthoflow/cli.hpp"

int main(int argc, char** argv) { return orthoflow::cli::dispatch(argc, argv); }
