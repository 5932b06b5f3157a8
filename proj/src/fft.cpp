#include "dmt/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace dmt::fft {

namespace {

// FFTW plans are cached per (size, direction). Plans are created with
// FFTW_UNALIGNED so they can execute on any caller buffer via
// fftw_execute_dft (the new-array interface), which is thread-safe;
// only plan creation needs the lock.
class PlanCache {
  public:
    fftw_plan get(size_t n, int sign) {
        std::lock_guard<std::mutex> lk(mu_);
        auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<std::complex<double>> tmp(n);
        auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

  private:
    std::mutex mu_;
    std::map<std::pair<size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void execute(cvec& x, int sign) {
    if (x.empty()) return;
    fftw_plan plan = cache().get(x.size(), sign);
    auto* p = reinterpret_cast<fftw_complex*>(x.data());
    fftw_execute_dft(plan, p, p);
    const double s = 1.0 / std::sqrt(static_cast<double>(x.size()));
    for (auto& v : x) v *= s;
}

} // namespace

void forward_inplace(cvec& x) { execute(x, FFTW_FORWARD); }
void inverse_inplace(cvec& x) { execute(x, FFTW_BACKWARD); }

cvec forward(cvec x) {
    forward_inplace(x);
    return x;
}

cvec inverse(cvec x) {
    inverse_inplace(x);
    return x;
}

} // namespace dmt::fft
