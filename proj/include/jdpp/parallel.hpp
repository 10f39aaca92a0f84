#pragma once

#include <exception>
#include <mutex>

namespace jdpp {

// Number of worker threads used by the OpenMP kernels; 0 keeps the runtime default.
void set_thread_count(int n);
int thread_count();

// Carries the first exception out of an OpenMP region.
class ExceptionSlot {
public:
    template <class F>
    void run(F&& f) noexcept {
        try {
            f();
        } catch (...) {
            std::lock_guard<std::mutex> lock(mu_);
            if (!ex_) ex_ = std::current_exception();
        }
    }
    void rethrow() const {
        if (ex_) std::rethrow_exception(ex_);
    }

private:
    std::mutex mu_;
    std::exception_ptr ex_;
};

}  // namespace jdpp
