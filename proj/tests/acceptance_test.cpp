// Runs AC1..AC9 and prints one line each. Nonzero exit if any fails.
#include <qgerbe/verify.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv)
{
    std::uint64_t seed = 20240521;
    if (argc > 1)
        seed = std::stoull(argv[1]);
    bool all = true;
    for (const auto& check : qgerbe::verify::all_checks()) {
        const auto r = check(seed);
        std::cout << qgerbe::verify::format_line(r) << std::endl;
        all = all && r.pass;
    }
    std::cout << (all ? "ALL PASS" : "SOME CRITERIA FAILED") << std::endl;
    return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
