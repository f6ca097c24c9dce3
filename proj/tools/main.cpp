#include "cli_app.hpp"

int main(int argc, char** argv) { return wrask::cli::run(argc, argv); }
