#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

namespace gmv::fft {

namespace detail {

// The FFTW planner is not reentrant; execution is.
inline std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

} // namespace detail

inline std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Real-to-half-complex transform of a fixed length, reusable across calls.
class ForwardReal {
public:
    explicit ForwardReal(std::size_t n) : n_(n)
    {
        in_ = fftw_alloc_real(n_);
        out_ = fftw_alloc_complex(n_ / 2 + 1);
        std::lock_guard lock(detail::planner_mutex());
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), in_, out_, FFTW_ESTIMATE);
    }
    ForwardReal(const ForwardReal&) = delete;
    ForwardReal& operator=(const ForwardReal&) = delete;
    ~ForwardReal()
    {
        {
            std::lock_guard lock(detail::planner_mutex());
            fftw_destroy_plan(plan_);
        }
        fftw_free(in_);
        fftw_free(out_);
    }

    std::size_t size() const { return n_; }

    // Input shorter than n is zero padded.
    std::vector<std::complex<double>> operator()(std::span<const double> x)
    {
        std::size_t i = 0;
        for (; i < x.size() && i < n_; ++i) in_[i] = x[i];
        for (; i < n_; ++i) in_[i] = 0.0;
        fftw_execute(plan_);
        std::vector<std::complex<double>> out(n_ / 2 + 1);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = {out_[k][0], out_[k][1]};
        return out;
    }

private:
    std::size_t n_;
    double* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

// Unnormalized complex backward transform of a fixed length.
class InverseComplex {
public:
    explicit InverseComplex(std::size_t n) : n_(n)
    {
        buf_in_ = fftw_alloc_complex(n_);
        buf_out_ = fftw_alloc_complex(n_);
        std::lock_guard lock(detail::planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n_), buf_in_, buf_out_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    InverseComplex(const InverseComplex&) = delete;
    InverseComplex& operator=(const InverseComplex&) = delete;
    ~InverseComplex()
    {
        {
            std::lock_guard lock(detail::planner_mutex());
            fftw_destroy_plan(plan_);
        }
        fftw_free(buf_in_);
        fftw_free(buf_out_);
    }

    std::size_t size() const { return n_; }

    std::span<std::complex<double>> input()
    {
        return {reinterpret_cast<std::complex<double>*>(buf_in_), n_};
    }
    std::span<const std::complex<double>> output() const
    {
        return {reinterpret_cast<const std::complex<double>*>(buf_out_), n_};
    }
    void execute() { fftw_execute(plan_); }

private:
    std::size_t n_;
    fftw_complex* buf_in_ = nullptr;
    fftw_complex* buf_out_ = nullptr;
    fftw_plan plan_ = nullptr;
};

} // namespace gmv::fft
