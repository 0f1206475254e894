#include "gsid/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace gsid {

namespace {

class Pool {
public:
    explicit Pool(int n) : threads_(n) {
        for (int i = 0; i < n; ++i) {
            workers_.emplace_back([this] { worker_loop(); });
        }
    }

    ~Pool() {
        {
            std::unique_lock lk(mu_);
            stop_ = true;
        }
        cv_.notify_all();
        for (auto& w : workers_) w.join();
    }

    int size() const { return threads_; }

    void run(int num_chunks, const std::function<void(int)>& fn) {
        std::unique_lock lk(run_mu_); // one parallel region at a time
        fn_.store(&fn);
        next_.store(num_chunks); // parked until total_ is published
        remaining_.store(num_chunks);
        total_.store(num_chunks);
        next_.store(0);
        error_ = nullptr;
        {
            std::unique_lock g(mu_);
            active_ = true;
        }
        cv_.notify_all();
        // The calling thread participates too.
        drain();
        std::unique_lock g(mu_);
        done_cv_.wait(g, [this] { return remaining_.load() == 0; });
        active_ = false;
        if (error_) std::rethrow_exception(error_);
    }

private:
    void drain() {
        int i;
        while ((i = next_.fetch_add(1)) < total_.load()) {
            try {
                (*fn_.load())(i);
            } catch (...) {
                std::unique_lock g(mu_);
                if (!error_) error_ = std::current_exception();
            }
            if (remaining_.fetch_sub(1) == 1) {
                std::unique_lock g(mu_);
                done_cv_.notify_all();
            }
        }
    }

    void worker_loop() {
        for (;;) {
            {
                std::unique_lock g(mu_);
                cv_.wait(g, [this] { return stop_ || (active_ && next_.load() < total_.load()); });
                if (stop_) return;
            }
            drain();
        }
    }

    int threads_;
    std::vector<std::thread> workers_;
    std::mutex mu_;
    std::mutex run_mu_;
    std::condition_variable cv_;
    std::condition_variable done_cv_;
    std::atomic<const std::function<void(int)>*> fn_{nullptr};
    std::atomic<int> next_{0};
    std::atomic<int> remaining_{0};
    std::atomic<int> total_{0};
    bool active_ = false;
    bool stop_ = false;
    std::exception_ptr error_;
};

std::mutex g_pool_mu;
std::unique_ptr<Pool> g_pool;
int g_requested = 0;

int default_threads() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

Pool& pool() {
    std::unique_lock lk(g_pool_mu);
    int want = g_requested > 0 ? g_requested : default_threads();
    if (!g_pool || g_pool->size() != want) {
        g_pool.reset();
        g_pool = std::make_unique<Pool>(want);
    }
    return *g_pool;
}

} // namespace

int thread_count() {
    return g_requested > 0 ? g_requested : default_threads();
}

void set_thread_count(int n) {
    std::unique_lock lk(g_pool_mu);
    g_requested = n < 0 ? 0 : n;
}

void parallel_chunks(int num_chunks, const std::function<void(int)>& fn) {
    if (num_chunks <= 0) return;
    if (num_chunks == 1 || thread_count() == 1) {
        for (int i = 0; i < num_chunks; ++i) fn(i);
        return;
    }
    pool().run(num_chunks, fn);
}

void parallel_blocks(size_t n, size_t block_size,
                     const std::function<void(size_t, size_t)>& fn) {
    if (n == 0) return;
    if (block_size == 0) block_size = 1;
    int chunks = static_cast<int>((n + block_size - 1) / block_size);
    parallel_chunks(chunks, [&](int c) {
        size_t b = static_cast<size_t>(c) * block_size;
        size_t e = std::min(n, b + block_size);
        fn(b, e);
    });
}

} // namespace gsid
