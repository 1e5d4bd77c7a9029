#include <iostream>

#include "fpconv/acceptance.hpp"

int main() {
    const auto results = fpconv::acceptance::run_all(std::cout);
    return fpconv::acceptance::all_passed(results) ? 0 : 1;
}
