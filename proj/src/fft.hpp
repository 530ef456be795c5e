#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace tiltpump::detail {

// Planner calls are not thread-safe in FFTW; execution on distinct plans is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// Unnormalized 1D complex DFT of fixed size with its own aligned buffer.
// FFTW_ESTIMATE keeps plans (and therefore results) deterministic.
class Fft1d {
public:
    Fft1d(std::size_t n, int sign) : n_(n) {
        data_ = fftw_alloc_complex(n);
        std::lock_guard lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), data_, data_, sign, FFTW_ESTIMATE);
    }
    Fft1d(const Fft1d&) = delete;
    Fft1d& operator=(const Fft1d&) = delete;
    ~Fft1d() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(data_);
    }

    std::size_t size() const noexcept { return n_; }
    std::complex<double>* data() noexcept { return reinterpret_cast<std::complex<double>*>(data_); }
    std::complex<double>& operator[](std::size_t i) noexcept { return data()[i]; }
    void execute() noexcept { fftw_execute(plan_); }

private:
    std::size_t n_;
    fftw_complex* data_ = nullptr;
    fftw_plan plan_ = nullptr;
};

} // namespace tiltpump::detail
