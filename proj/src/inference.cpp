#include "sagenet/inference.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace sagenet {

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

InferenceResult run_inference(const InferenceContext& ctx, std::span<const NodeId> nodes) {
  if (!ctx.params || !ctx.graph || !ctx.feats) throw Error("inference context is incomplete");
  if (ctx.batch_size == 0) throw Error("batch_size must be positive");
  const auto& params = *ctx.params;
  const std::size_t batches = (nodes.size() + ctx.batch_size - 1) / ctx.batch_size;
  std::vector<ForwardPass> passes(batches);

  parallel_for(batches, ctx.threads, [&](std::size_t b) {
    const std::size_t lo = b * ctx.batch_size;
    const std::size_t hi = std::min(nodes.size(), lo + ctx.batch_size);
    auto seeds = nodes.subspan(lo, hi - lo);
    auto block = sample_neighborhood(*ctx.graph, seeds, ctx.sampler, ctx.artists, ctx.seed);
    passes[b] = forward(params, *ctx.feats, ctx.visual, block);
    passes[b].encoder = {};  // only the outputs are kept
  });

  InferenceResult out;
  out.nodes.assign(nodes.begin(), nodes.end());
  out.embeddings = nn::Tensor2(nodes.size(), params.config.embedding_dim());
  for (const auto& h : params.heads) out.outputs.emplace_back(nodes.size(), h.w.rows());
  std::size_t row = 0;
  for (const auto& p : passes) {
    for (std::size_t i = 0; i < p.embedding.rows(); ++i, ++row) {
      std::copy(p.embedding.row(i).begin(), p.embedding.row(i).end(), out.embeddings.row(row).begin());
      for (std::size_t t = 0; t < p.outputs.size(); ++t)
        std::copy(p.outputs[t].row(i).begin(), p.outputs[t].row(i).end(), out.outputs[t].row(row).begin());
    }
  }
  return out;
}

}  // namespace sagenet
