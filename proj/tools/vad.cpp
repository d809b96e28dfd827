#include "vad/cli.hpp"

int main(int argc, char** argv) { return vad::cli::run(argc, argv); }
