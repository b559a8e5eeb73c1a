#include <cstdlib>
#include <iostream>
#include <string>

#include "rtp/acceptance.hpp"
#include "rtp/parallel.hpp"

int main(int argc, char** argv)
{
    rtp::AcceptanceOptions opt;
    opt.workers = rtp::default_workers();
    for (int i = 1; i < argc; ++i)
        opt.only.push_back(std::stoi(argv[i]));
    opt.on_result = [](const rtp::CriterionResult& r) { std::cout << rtp::format_result(r) << std::endl; };
    bool ok = true;
    for (const auto& r : rtp::run_acceptance(opt))
        ok = ok && r.passed;
    return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
