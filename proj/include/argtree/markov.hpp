#ifndef ARGTREE_MARKOV_HPP
#define ARGTREE_MARKOV_HPP

#include <concepts>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace argtree {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// A second-order hidden Markov model. States are 0..state_count()-1 and the
// index state_count() is the boundary symbol: two boundaries form the initial
// context and a transition into the boundary ends the sequence.
template <typename M>
concept SecondOrderModel = requires(const M& m, std::size_t s, std::string_view t) {
  { m.state_count() } -> std::convertible_to<std::size_t>;
  { m.log_transition(s, s, s) } -> std::convertible_to<double>;
  { m.log_emission(s, t) } -> std::convertible_to<double>;
};

struct MaxMarginals {
  std::vector<std::size_t> best_path;
  double best_log_prob = kLogZero;
  // max_marginal[i][s]: log probability of the best complete path that is in
  // state s at position i.
  std::vector<std::vector<double>> max_marginal;
};

// Viterbi forward pass plus a max-product backward pass. Together they give,
// for every position and state, the best complete path through that state,
// which is what the reliability grading needs. Ties resolve to the lowest
// state index.
template <SecondOrderModel M>
MaxMarginals viterbi_max_marginals(const M& model, std::span<const std::string> outputs) {
  const std::size_t n = model.state_count();
  const std::size_t boundary = n;
  const std::size_t k = outputs.size();
  MaxMarginals result;
  if (k == 0 || n == 0) return result;

  const std::size_t width = n + 1;  // previous state, boundary included
  auto at = [&](std::size_t prev, std::size_t cur) { return prev * n + cur; };

  std::vector<std::vector<double>> emit(k, std::vector<double>(n));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t s = 0; s < n; ++s) emit[i][s] = model.log_emission(s, outputs[i]);

  // forward[i][(p,c)]: best log prob of a prefix ending with states p, c at i.
  std::vector<std::vector<double>> forward(k, std::vector<double>(width * n, kLogZero));
  std::vector<std::vector<std::size_t>> back(k, std::vector<std::size_t>(width * n, boundary));

  for (std::size_t c = 0; c < n; ++c)
    forward[0][at(boundary, c)] = model.log_transition(boundary, boundary, c) + emit[0][c];

  for (std::size_t i = 1; i < k; ++i) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t c = 0; c < n; ++c) {
        double best = kLogZero;
        std::size_t arg = boundary;
        bool found = false;
        for (std::size_t pp = 0; pp < width; ++pp) {
          const double prev = forward[i - 1][at(pp, p)];
          if (prev == kLogZero) continue;
          const double v = prev + model.log_transition(pp, p, c);
          if (!found || v > best) {
            best = v;
            arg = pp;
            found = true;
          }
        }
        forward[i][at(p, c)] = found ? best + emit[i][c] : kLogZero;
        back[i][at(p, c)] = arg;
      }
    }
  }

  // backward[i][(p,c)]: best log prob of completing the sequence after i.
  std::vector<std::vector<double>> backward(k, std::vector<double>(width * n, kLogZero));
  for (std::size_t p = 0; p < width; ++p)
    for (std::size_t c = 0; c < n; ++c) backward[k - 1][at(p, c)] = model.log_transition(p, c, boundary);
  for (std::size_t i = k - 1; i-- > 0;) {
    for (std::size_t p = 0; p < width; ++p) {
      for (std::size_t c = 0; c < n; ++c) {
        double best = kLogZero;
        for (std::size_t nx = 0; nx < n; ++nx) {
          const double v = model.log_transition(p, c, nx) + emit[i + 1][nx] + backward[i + 1][at(c, nx)];
          if (v > best) best = v;
        }
        backward[i][at(p, c)] = best;
      }
    }
  }

  // Final argmax over the last pair of states.
  std::size_t last_p = boundary, last_c = 0;
  double best = kLogZero;
  bool found = false;
  for (std::size_t p = 0; p < width; ++p) {
    for (std::size_t c = 0; c < n; ++c) {
      const double f = forward[k - 1][at(p, c)];
      if (f == kLogZero) continue;
      const double v = f + model.log_transition(p, c, boundary);
      if (!found || v > best) {
        best = v;
        last_p = p;
        last_c = c;
        found = true;
      }
    }
  }
  result.best_log_prob = best;

  result.best_path.assign(k, 0);
  if (found) {
    std::size_t p = last_p, c = last_c;
    for (std::size_t i = k; i-- > 0;) {
      result.best_path[i] = c;
      const std::size_t pp = back[i][at(p, c)];
      c = p;
      p = pp;
    }
  }

  result.max_marginal.assign(k, std::vector<double>(n, kLogZero));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t p = 0; p < width; ++p) {
      for (std::size_t c = 0; c < n; ++c) {
        const double f = forward[i][at(p, c)];
        if (f == kLogZero) continue;
        const double v = f + backward[i][at(p, c)];
        if (v > result.max_marginal[i][c]) result.max_marginal[i][c] = v;
      }
    }
  }
  return result;
}

}  // namespace argtree

#endif  // ARGTREE_MARKOV_HPP
