#include "fft2.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace lqg::detail {

namespace {

std::mutex g_plan_mutex;

fftw_plan plan_for(int n, bool inverse) {
    static std::map<std::pair<int, bool>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_pair(n, inverse);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    fftw_complex* scratch = fftw_alloc_complex(std::size_t(n) * n);
    if (!scratch) throw std::bad_alloc();
    fftw_plan p = fftw_plan_dft_2d(n, n, scratch, scratch,
                                   inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (!p) throw std::runtime_error("fft2: FFTW planning failed");
    cache.emplace(key, p);
    return p;
}

}  // namespace

void fft2(std::complex<double>* data, int n, bool inverse) {
    if (n <= 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft2: n must be a power of two");
    fftw_plan p = plan_for(n, inverse);
    // new-array execute; fftw_complex and std::complex<double> share layout
    auto* raw = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, raw, raw);
}

}  // namespace lqg::detail
