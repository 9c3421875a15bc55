#ifndef DR_PARALLEL_HPP
#define DR_PARALLEL_HPP

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace dr {

// Worker-count knob. The chunking of any parallel reduction is a function of
// the problem only, and chunk results are combined in chunk order, so results
// are identical for every thread count.
inline int& thread_count_ref() {
    static int count = [] {
        if (const char* env = std::getenv("DRENGINE_THREADS")) {
            int v = std::atoi(env);
            if (v > 0) return v;
        }
        unsigned hc = std::thread::hardware_concurrency();
        return hc ? (int)hc : 1;
    }();
    return count;
}

inline int thread_count() { return thread_count_ref(); }
inline void set_thread_count(int n) { thread_count_ref() = n > 0 ? n : 1; }

// Evaluates work(chunk) for chunk = 0..num_chunks-1 across threads and
// combines results in chunk order via fold.
template <typename T>
T parallel_reduce(int num_chunks, const std::function<T(int)>& work,
                  const std::function<void(T&, T&&)>& fold, T init) {
    int workers = std::min(thread_count(), num_chunks);
    std::vector<T> results(num_chunks, init);
    if (workers <= 1) {
        for (int c = 0; c < num_chunks; ++c) results[c] = work(c);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (int c = w; c < num_chunks; c += workers) results[c] = work(c);
            });
        for (auto& t : pool) t.join();
    }
    T acc = std::move(init);
    for (int c = 0; c < num_chunks; ++c) fold(acc, std::move(results[c]));
    return acc;
}

} // namespace dr

#endif
