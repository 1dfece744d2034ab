#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace recourse {

// Persistent pool for the one parallel pattern this project needs: run a
// function over a static partition of [0, n) into exactly width() contiguous
// chunks. Chunk boundaries depend only on (n, width), never on scheduling,
// so callers that fold per-chunk results in chunk order produce output that
// is independent of thread timing. width() == 1 runs everything inline.
class ThreadPool {
 public:
  explicit ThreadPool(unsigned threads);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  unsigned width() const { return width_; }

  // Blocks until fn(chunk_begin, chunk_end, lane) ran for every lane in
  // [0, width()). Lane `lane` owns the half-open index range of its chunk;
  // trailing lanes may get empty ranges. The first exception thrown by any
  // lane is rethrown here.
  void run(std::size_t n, const std::function<void(std::size_t, std::size_t, unsigned)>& fn);

 private:
  void worker_loop(unsigned lane);

  unsigned width_ = 1;
  std::vector<std::thread> workers_;

  std::mutex mu_;
  std::condition_variable cv_job_;
  std::condition_variable cv_done_;
  std::uint64_t generation_ = 0;
  unsigned remaining_ = 0;
  bool stop_ = false;
  std::size_t job_n_ = 0;
  const std::function<void(std::size_t, std::size_t, unsigned)>* job_fn_ = nullptr;
  std::vector<std::exception_ptr> errors_;
};

}  // namespace recourse
