#include "synthqa/cli.hpp"

int main(int argc, char** argv) { return synthqa::run(argc, argv); }
