#include <iostream>

#include "henon/app.hpp"

int main(int argc, char** argv) { return henon::app::run(argc, argv, std::cout, std::cerr); }
