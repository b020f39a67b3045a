#include "chattox/cli/app.hpp"

int main(int argc, char** argv) { return chattox::cli::run(argc, argv); }
