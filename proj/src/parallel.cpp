#include "anderson/parallel.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "anderson/errors.hpp"

namespace anderson {

unsigned resolve_thread_count(std::optional<unsigned> requested) {
    if (requested) return std::max(1U, *requested);
    if (const char* env = std::getenv("ANDERSON_SPECTRA_THREADS"); env && *env) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
        throw InvalidArgument(std::string("ANDERSON_SPECTRA_THREADS must be a positive integer, got '") +
                              env + "'");
    }
    return 1;
}

SampleMoments sample_moments(const std::vector<double>& xs) {
    SampleMoments m;
    m.count = xs.size();
    if (xs.empty()) return m;
    CompensatedSum s;
    for (double x : xs) s.add(x);
    m.mean = s.value() / static_cast<double>(xs.size());
    if (xs.size() < 2) return m;
    CompensatedSum ss;
    for (double x : xs) ss.add((x - m.mean) * (x - m.mean));
    m.stddev = std::sqrt(ss.value() / static_cast<double>(xs.size() - 1));
    m.stderr_of_mean = m.stddev / std::sqrt(static_cast<double>(xs.size()));
    return m;
}

}  // namespace anderson
