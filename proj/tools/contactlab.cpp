#include "contactlab/io/experiment.hpp"

int main(int argc, char** argv) { return contactlab::run_cli(argc, argv); }
