#pragma once

// Dense double-precision kernels used by the sampler's inner loops.
//
// Every kernel has a scalar reference implementation; an AVX2 variant is
// selected at runtime when the CPU supports it. Elementwise kernels are
// bit-identical across backends. Reductions accumulate in a different order
// in the vector backends, so they agree with the scalar reference only to
// rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace xcmix::kernels {

enum class Backend { scalar, avx2 };

std::string_view to_string(Backend b);

bool available(Backend b);

// Best backend supported by this CPU, unless XCMIX_KERNELS=scalar is set.
Backend best_backend();

Backend active_backend();

// Switches the process-wide backend; throws std::invalid_argument if the CPU
// cannot run it. Not meant to be called while a sampler is running.
void set_backend(Backend b);

double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double sum_squares(std::span<const double> x);
// sum (x_i - y_i)^2
double squared_distance(std::span<const double> x, std::span<const double> y);
// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
// y += a
void add_scalar(double a, std::span<double> y);

// Raw backend entry points, used by equivalence tests.
struct Table {
    double (*sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum_squares)(const double*, std::size_t);
    double (*squared_distance)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*add_scalar)(double, double*, std::size_t);
};

const Table& table(Backend b);

namespace scalar {
extern const Table kTable;
}

#if defined(XCMIX_HAVE_AVX2)
namespace avx2 {
extern const Table kTable;
}
#endif

} // namespace xcmix::kernels
