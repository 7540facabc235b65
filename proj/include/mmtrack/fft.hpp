// SPDX-License-Identifier: Apache-2.0
//
// Thin RAII wrapper over FFTW's double-precision complex transforms.

#ifndef MMTRACK_FFT_HPP
#define MMTRACK_FFT_HPP

#include "core.hpp"

#include <fftw3.h>

#include <mutex>
#include <span>

namespace mmtrack {

namespace detail {
// FFTW planning is not thread-safe; execution on new-array plans is.
inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}
} // namespace detail

enum class FftDirection { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

// Unnormalized in-place transform of a fixed length.
//   forward:  X[k] = sum_n x[n] exp(-j 2 pi k n / N)
//   backward: X[k] = sum_n x[n] exp(+j 2 pi k n / N)
class FftPlan {
public:
    FftPlan(std::size_t n, FftDirection dir) : n_(n), buf_(n)
    {
        if (n == 0) throw ContractError("FFT length must be positive");
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(buf_.data()),
                                 reinterpret_cast<fftw_complex*>(buf_.data()), static_cast<int>(dir),
                                 FFTW_ESTIMATE);
        if (plan_ == nullptr) throw Error("FFTW failed to create a plan");
    }

    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    ~FftPlan()
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }

    std::size_t size() const { return n_; }

    // Working buffer; fill it, call execute(), read it back.
    std::span<cplx> buffer() { return buf_; }

    void execute() { fftw_execute(plan_); }

private:
    std::size_t n_;
    std::vector<cplx> buf_;
    fftw_plan plan_ = nullptr;
};

} // namespace mmtrack

#endif
