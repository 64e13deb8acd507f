#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <queue>
#include <thread>
#include <vector>

#include "exvocab/document.hpp"
#include "exvocab/ingest.hpp"

namespace exvocab {

struct ShardOptions {
  unsigned workers = 1;
  std::size_t batch_size = 4096;
};

// Streams `source` in batches to `workers` threads. Each worker owns one
// State (created by init()) and folds documents into it with
// process(State&, const Document&). Returns the per-worker states in worker
// order; callers merge them. Memory is bounded by 2 * workers batches.
template <typename State, typename Init, typename Process>
std::vector<State> run_sharded(DocumentSource& source, const ShardOptions& options, Init init,
                               Process process) {
  const unsigned workers = options.workers == 0 ? 1 : options.workers;
  std::vector<State> states;
  states.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) states.push_back(init());

  if (workers == 1) {
    Document doc;
    while (source.next(doc)) process(states[0], doc);
    return states;
  }

  std::mutex mu;
  std::condition_variable not_empty;
  std::condition_variable not_full;
  std::queue<std::vector<Document>> queue;
  bool closed = false;
  std::exception_ptr failure;
  const std::size_t capacity = 2 * static_cast<std::size_t>(workers);

  auto worker_loop = [&](State& state) {
    while (true) {
      std::vector<Document> batch;
      {
        std::unique_lock lock(mu);
        not_empty.wait(lock, [&] { return !queue.empty() || closed; });
        if (queue.empty()) return;
        batch = std::move(queue.front());
        queue.pop();
      }
      not_full.notify_one();
      try {
        for (const auto& doc : batch) process(state, doc);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        closed = true;
        not_full.notify_all();
        not_empty.notify_all();
        return;
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) threads.emplace_back(worker_loop, std::ref(states[w]));

  try {
    std::vector<Document> batch;
    batch.reserve(options.batch_size);
    Document doc;
    auto push = [&] {
      std::unique_lock lock(mu);
      not_full.wait(lock, [&] { return queue.size() < capacity || closed; });
      if (closed) return false;
      queue.push(std::move(batch));
      batch = {};
      batch.reserve(options.batch_size);
      not_empty.notify_one();
      return true;
    };
    bool open = true;
    while (open && source.next(doc)) {
      batch.push_back(std::move(doc));
      if (batch.size() >= options.batch_size) open = push();
    }
    if (open && !batch.empty()) push();
  } catch (...) {
    std::lock_guard lock(mu);
    if (!failure) failure = std::current_exception();
  }
  {
    std::lock_guard lock(mu);
    closed = true;
  }
  not_empty.notify_all();
  not_full.notify_all();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return states;
}

}  // namespace exvocab
