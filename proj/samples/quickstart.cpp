// Generate one instance, pick the cutoff for its quality and run both
// threshold policies on it.

#include <cstdio>

#include "wssp/wssp.hpp"

int main() {
    using namespace wssp;
    const int n = 100, b = 5, r = 2;
    const double q = 0.75;

    const WsspInstance inst = generate_instance(n, b, q, r, std::uint64_t{42});
    const auto tr = translate_cutoff(n, b, q, r, analytic_cutoff_source());
    const int c = tr.degenerate ? 0 : tr.c_target;

    const auto csm = run_csm(inst, c);
    const auto acsm = run_acsm(inst, c, default_zone(n, b, r, c));
    std::printf("quality %.3f, cutoff %d\n", compute_quality(inst), c);
    std::printf("csm:  hires %d failures %d regret %ld\n", csm.hires, csm.failures, csm.regret);
    std::printf("acsm: hires %d failures %d regret %ld\n", acsm.hires, acsm.failures, acsm.regret);
    std::printf("%s\n", to_json(csm).dump().c_str());
}
