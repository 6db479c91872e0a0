#include "xcmix/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace xcmix::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(XCMIX_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::atomic<const Table*>& active_table() {
    static std::atomic<const Table*> t{&table(best_backend())};
    return t;
}

std::atomic<Backend>& active_id() {
    static std::atomic<Backend> b{best_backend()};
    return b;
}

} // namespace

std::string_view to_string(Backend b) { return b == Backend::scalar ? "scalar" : "avx2"; }

bool available(Backend b) {
    if (b == Backend::scalar) return true;
    static const bool avx2 = cpu_has_avx2();
    return avx2;
}

Backend best_backend() {
    const char* env = std::getenv("XCMIX_KERNELS");
    if (env && std::strcmp(env, "scalar") == 0) return Backend::scalar;
    return available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

const Table& table(Backend b) {
    if (!available(b)) throw std::invalid_argument("kernel backend '" + std::string(to_string(b)) + "' not available");
#if defined(XCMIX_HAVE_AVX2)
    if (b == Backend::avx2) return avx2::kTable;
#endif
    return scalar::kTable;
}

Backend active_backend() { return active_id().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    const Table* t = &table(b);
    active_table().store(t);
    active_id().store(b);
}

double sum(std::span<const double> x) { return active_table().load(std::memory_order_relaxed)->sum(x.data(), x.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("dot: length mismatch");
    return active_table().load(std::memory_order_relaxed)->dot(x.data(), y.data(), x.size());
}

double sum_squares(std::span<const double> x) {
    return active_table().load(std::memory_order_relaxed)->sum_squares(x.data(), x.size());
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("squared_distance: length mismatch");
    return active_table().load(std::memory_order_relaxed)->squared_distance(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
    active_table().load(std::memory_order_relaxed)->axpy(a, x.data(), y.data(), x.size());
}

void add_scalar(double a, std::span<double> y) {
    active_table().load(std::memory_order_relaxed)->add_scalar(a, y.data(), y.size());
}

} // namespace xcmix::kernels
