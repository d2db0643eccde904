#include "app.hpp"

int main(int argc, char** argv) { return opinionkit::run_cli(argc, argv); }
