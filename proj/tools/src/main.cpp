#include "app.hpp"

int main(int argc, char** argv) { return mcgpp::app::main(argc, argv); }
