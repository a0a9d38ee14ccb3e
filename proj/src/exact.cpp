#include "merw/exact.hpp"

#include <algorithm>
#include <stdexcept>

#include "merw/errors.hpp"

namespace merw::exact {

namespace {

// mpq arithmetic and equality assume canonical operands; callers may hand us
// ratios like 624/1000, so every public entry point normalizes first.
Rational canon(const Rational& r) {
  Rational c = r;
  c.canonicalize();
  return c;
}

ExactConfig canonical_config(const ExactConfig& config) {
  ExactConfig c = config;
  c.p.canonicalize();
  c.q.canonicalize();
  return c;
}

}  // namespace

Rational from_decimal(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("from_decimal: empty string");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    // Base 10 always; the default base-0 constructor would read a leading
    // zero as an octal prefix.
    mpz_class num(text.substr(0, slash), 10);
    mpz_class den(text.substr(slash + 1), 10);
    if (den == 0) throw std::invalid_argument("from_decimal: zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
  }
  std::string digits;
  bool negative = false;
  std::size_t i = 0;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  std::size_t frac_digits = 0;
  bool seen_dot = false;
  bool seen_digit = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.') {
      if (seen_dot) throw std::invalid_argument("from_decimal: malformed literal " + text);
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      seen_digit = true;
      if (seen_dot) ++frac_digits;
    } else {
      throw std::invalid_argument("from_decimal: malformed literal " + text);
    }
  }
  if (!seen_digit) throw std::invalid_argument("from_decimal: malformed literal " + text);
  mpz_class num(digits.empty() ? std::string("0") : digits, 10);
  if (negative) num = -num;
  mpz_class den = 1;
  for (std::size_t k = 0; k < frac_digits; ++k) den *= 10;
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational critical_memory_exact(int d) {
  if (d < 1) throw std::invalid_argument("critical_memory_exact: dimension must be >= 1");
  return Rational(2 * d + 1, 4 * d);
}

Rational memory_to_a_exact(int d, const Rational& p) {
  if (d < 1) throw std::invalid_argument("memory_to_a_exact: dimension must be >= 1");
  if (p < 0 || p > 1) throw std::invalid_argument("memory_to_a_exact: p must lie in [0,1]");
  return (Rational(2 * d) * canon(p) - 1) / Rational(2 * d - 1);
}

RegimeKind classify_exact(int d, const Rational& p) {
  const Rational pd = critical_memory_exact(d);
  const Rational pc = canon(p);
  if (pc == pd) return RegimeKind::Critical;
  return pc < pd ? RegimeKind::Diffusive : RegimeKind::Superdiffusive;
}

void ExactConfig::validate() const {
  if (d < 1) throw std::invalid_argument("ExactConfig: dimension must be >= 1");
  if (p < 0 || p > 1) throw std::invalid_argument("ExactConfig: p must lie in [0,1]");
  if (biased && (q < 0 || q > 1)) throw std::invalid_argument("ExactConfig: q must lie in [0,1]");
}

std::int64_t key_position(const CountsKey& key, int axis) {
  return static_cast<std::int64_t>(key[2 * (axis - 1)]) -
         static_cast<std::int64_t>(key[2 * (axis - 1) + 1]);
}

std::uint64_t key_axis_count(const CountsKey& key, int axis) {
  return static_cast<std::uint64_t>(key[2 * (axis - 1)]) + key[2 * (axis - 1) + 1];
}

std::uint64_t composition_count(std::uint64_t n, int parts) {
  // C(n + parts - 1, parts - 1) with saturation.
  const std::uint64_t kMax = ~0ULL;
  std::uint64_t result = 1;
  for (int j = 1; j < parts; ++j) {
    const std::uint64_t factor = n + static_cast<std::uint64_t>(j);
    if (result > kMax / factor) return kMax;
    result = result * factor / static_cast<std::uint64_t>(j);
  }
  return result;
}

namespace {

std::map<CountsKey, Rational> first_level(const ExactConfig& config) {
  const int d = config.d;
  std::map<CountsKey, Rational> level;
  if (!config.biased) {
    const Rational each(1, 2 * d);
    for (int code = 0; code < 2 * d; ++code) {
      CountsKey key(2 * d, 0);
      key[code] = 1;
      level.emplace(std::move(key), each);
    }
    return level;
  }
  const Rational rest = (Rational(1) - config.q) / Rational(2 * d - 1);
  for (int code = 0; code < 2 * d; ++code) {
    const Rational mass = (code == 0) ? config.q : rest;
    if (mass == 0) continue;
    CountsKey key(2 * d, 0);
    key[code] = 1;
    level.emplace(std::move(key), mass);
  }
  return level;
}

}  // namespace

std::vector<Rational> step_distribution_exact(const CountsKey& counts, std::uint64_t n,
                                              const ExactConfig& config) {
  if (n == 0) throw std::invalid_argument("step_distribution_exact: undefined at n = 0");
  const int d = config.d;
  const Rational p = canon(config.p);
  const Rational off = (Rational(1) - p) / Rational(2 * d - 1);
  std::vector<Rational> probs(2 * d);
  const Rational nn(static_cast<unsigned long>(n));
  for (int j = 0; j < 2 * d; ++j) {
    const Rational c(static_cast<unsigned long>(counts[j]));
    probs[j] = (p * c + off * (nn - c)) / nn;
  }
  return probs;
}

std::vector<ExactLaw> enumerate_exact_levels(std::uint64_t n, const ExactConfig& raw,
                                             std::uint64_t state_budget) {
  const ExactConfig config = canonical_config(raw);
  config.validate();
  if (n < 1) throw std::invalid_argument("enumerate_exact_levels: n must be >= 1");
  const std::uint64_t required = composition_count(n, 2 * config.d);
  if (required > state_budget) throw BudgetError(required, state_budget);

  std::vector<ExactLaw> levels;
  levels.reserve(n);
  ExactLaw law;
  law.d = config.d;
  law.n = 1;
  law.prob = first_level(config);
  levels.push_back(law);

  for (std::uint64_t step = 1; step < n; ++step) {
    ExactLaw next;
    next.d = config.d;
    next.n = step + 1;
    for (const auto& [key, mass] : levels.back().prob) {
      const auto probs = step_distribution_exact(key, step, config);
      for (int j = 0; j < 2 * config.d; ++j) {
        if (probs[j] == 0) continue;
        CountsKey moved = key;
        moved[j] += 1;
        next.prob[std::move(moved)] += mass * probs[j];
      }
    }
    levels.push_back(std::move(next));
  }
  return levels;
}

ExactLaw enumerate_exact(std::uint64_t n, const ExactConfig& config, std::uint64_t state_budget) {
  auto levels = enumerate_exact_levels(n, config, state_budget);
  return std::move(levels.back());
}

ExactLaw enumerate_full_history(std::uint64_t n, const ExactConfig& raw,
                                std::uint64_t history_budget) {
  const ExactConfig config = canonical_config(raw);
  config.validate();
  if (n < 1) throw std::invalid_argument("enumerate_full_history: n must be >= 1");
  const int d = config.d;
  std::uint64_t required = 1;
  for (std::uint64_t k = 0; k < n; ++k) {
    if (required > history_budget / (2 * d)) {
      required = ~0ULL;
      break;
    }
    required *= 2 * d;
  }
  if (required > history_budget) throw BudgetError(required, history_budget);

  using History = std::vector<std::uint8_t>;
  std::map<History, Rational> histories;
  for (const auto& [key, mass] : first_level(config)) {
    int code = 0;
    for (int j = 0; j < 2 * d; ++j)
      if (key[j] == 1) code = j;
    histories.emplace(History{static_cast<std::uint8_t>(code)}, mass);
  }

  const Rational off = (Rational(1) - config.p) / Rational(2 * d - 1);
  for (std::uint64_t step = 1; step < n; ++step) {
    std::map<History, Rational> next;
    const Rational inv_n(1, static_cast<unsigned long>(step));
    for (const auto& [hist, mass] : histories) {
      // Literal law: uniform remembered time, then the matrix table.
      std::vector<Rational> dist(2 * d, Rational(0));
      for (std::uint64_t k = 0; k < step; ++k) {
        const SignedDirection recalled = SignedDirection::from_code(hist[k]);
        if (config.p != 0)
          dist[apply_matrix(0, +1, recalled, d).code()] += config.p * inv_n;
        if (off != 0) {
          dist[apply_matrix(0, -1, recalled, d).code()] += off * inv_n;
          for (int power = 1; power < d; ++power) {
            dist[apply_matrix(power, +1, recalled, d).code()] += off * inv_n;
            dist[apply_matrix(power, -1, recalled, d).code()] += off * inv_n;
          }
        }
      }
      for (int code = 0; code < 2 * d; ++code) {
        if (dist[code] == 0) continue;
        History extended = hist;
        extended.push_back(static_cast<std::uint8_t>(code));
        next[std::move(extended)] += mass * dist[code];
      }
    }
    histories = std::move(next);
  }

  ExactLaw law;
  law.d = d;
  law.n = n;
  for (const auto& [hist, mass] : histories) {
    CountsKey key(2 * d, 0);
    for (const auto code : hist) key[code] += 1;
    law.prob[std::move(key)] += mass;
  }
  return law;
}

ExactMoments law_moments(const ExactLaw& law, const ExactConfig& raw) {
  const ExactConfig config = canonical_config(raw);
  const int d = law.d;
  ExactMoments m;
  m.mean.assign(d, Rational(0));
  m.second_moment.assign(static_cast<std::size_t>(d) * d, Rational(0));
  m.occupation_mean.assign(d, Rational(0));
  Rational norm2_sum(0);
  for (const auto& [key, mass] : law.prob) {
    for (int i = 1; i <= d; ++i) {
      const Rational si(static_cast<long>(key_position(key, i)));
      m.mean[i - 1] += mass * si;
      m.occupation_mean[i - 1] += mass * Rational(static_cast<unsigned long>(key_axis_count(key, i)));
      for (int j = i; j <= d; ++j) {
        const Rational sj(static_cast<long>(key_position(key, j)));
        m.second_moment[(i - 1) * d + (j - 1)] += mass * si * sj;
      }
      norm2_sum += mass * si * si;
    }
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j) m.second_moment[i * d + j] = m.second_moment[j * d + i];

  const Rational a = memory_to_a_exact(config.d, config.p);
  if (a > -1) {
    const auto an = an_series_exact(law.n, a);
    m.m_norm2 = an.back() * an.back() * norm2_sum;
    m.has_m_norm2 = true;
  }
  return m;
}

std::vector<Rational> an_series_exact(std::uint64_t n, const Rational& raw_a) {
  if (n < 1) throw std::invalid_argument("an_series_exact: n must be >= 1");
  const Rational a = canon(raw_a);
  if (a <= -1) throw std::domain_error("an_series_exact: requires a > -1");
  std::vector<Rational> series(n);
  series[0] = 1;
  for (std::uint64_t k = 1; k < n; ++k) {
    const Rational kk(static_cast<unsigned long>(k));
    series[k] = series[k - 1] * kk / (kk + a);
  }
  return series;
}

namespace {

// Per-axis first-step occupation probabilities lambda_i = P(X_1 on axis i).
std::vector<Rational> first_axis_occupation(const ExactConfig& config) {
  const int d = config.d;
  std::vector<Rational> lambda(d);
  if (!config.biased) {
    for (int i = 0; i < d; ++i) lambda[i] = Rational(1, d);
    return lambda;
  }
  const Rational rest = (Rational(1) - config.q) / Rational(2 * d - 1);
  lambda[0] = config.q + rest;
  for (int i = 1; i < d; ++i) lambda[i] = 2 * rest;
  return lambda;
}

}  // namespace

std::vector<std::vector<Rational>> second_moment_recurrence_exact(std::uint64_t n,
                                                                  const ExactConfig& raw) {
  const ExactConfig config = canonical_config(raw);
  config.validate();
  if (n < 1) throw std::invalid_argument("second_moment_recurrence_exact: n must be >= 1");
  const int d = config.d;
  const Rational a = memory_to_a_exact(d, config.p);
  const auto lambda = first_axis_occupation(config);

  // Occupation correction Delta = diag(lambda_i - 1/d); identically zero for
  // the uniform first step and for d = 1.
  std::vector<Rational> delta(d);
  bool has_delta = false;
  for (int i = 0; i < d; ++i) {
    delta[i] = lambda[i] - Rational(1, d);
    if (delta[i] != 0) has_delta = true;
  }
  std::vector<Rational> an;
  if (has_delta) an = an_series_exact(n, a);  // a > -1 holds whenever d >= 2

  std::vector<std::vector<Rational>> tables;
  tables.reserve(n);
  std::vector<Rational> current(static_cast<std::size_t>(d) * d, Rational(0));
  for (int i = 0; i < d; ++i) current[i * d + i] = lambda[i];
  tables.push_back(current);

  for (std::uint64_t k = 1; k < n; ++k) {
    const Rational kk(static_cast<unsigned long>(k));
    const Rational growth = 1 + 2 * a / kk;
    std::vector<Rational> next(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d * d; ++i) next[i] = growth * current[i];
    for (int i = 0; i < d; ++i) {
      next[i * d + i] += Rational(1, d);
      if (has_delta) next[i * d + i] += a / (kk * an[k - 1]) * delta[i];
    }
    current = std::move(next);
    tables.push_back(current);
  }
  return tables;
}

std::vector<std::vector<Rational>> mean_recurrence_exact(std::uint64_t n,
                                                         const ExactConfig& raw) {
  const ExactConfig config = canonical_config(raw);
  config.validate();
  if (n < 1) throw std::invalid_argument("mean_recurrence_exact: n must be >= 1");
  const int d = config.d;
  const Rational a = memory_to_a_exact(d, config.p);
  std::vector<std::vector<Rational>> means;
  means.reserve(n);
  std::vector<Rational> current(d, Rational(0));
  if (config.biased) current[0] = (Rational(2 * d) * config.q - 1) / Rational(2 * d - 1);
  means.push_back(current);
  for (std::uint64_t k = 1; k < n; ++k) {
    const Rational gamma = 1 + a / Rational(static_cast<unsigned long>(k));
    for (auto& value : current) value *= gamma;
    means.push_back(current);
  }
  return means;
}

std::pair<Rational, Rational> conditional_eps_moments_exact(const CountsKey& counts,
                                                            std::uint64_t n,
                                                            const ExactConfig& raw) {
  if (n < 1) throw std::invalid_argument("conditional_eps_moments_exact: n must be >= 1");
  const ExactConfig config = canonical_config(raw);
  const int d = config.d;
  const Rational a = memory_to_a_exact(d, config.p);
  const Rational r = a / Rational(static_cast<unsigned long>(n));

  Rational s_norm2(0);
  Rational s_sigma_s(0);
  for (int i = 1; i <= d; ++i) {
    const Rational si(static_cast<long>(key_position(counts, i)));
    s_norm2 += si * si;
    s_sigma_s += Rational(static_cast<unsigned long>(key_axis_count(counts, i))) * si * si;
  }

  const Rational m2 = 1 - r * r * s_norm2;
  const Rational m4 = 1 - 3 * r * r * r * r * s_norm2 * s_norm2 -
                      2 * (1 - 2 * (1 - a) / Rational(d)) * r * r * s_norm2 +
                      4 * a / Rational(static_cast<unsigned long>(n)) * r * r * s_sigma_s;
  return {m2, m4};
}

std::vector<Rational> martingale_defect(const CountsKey& counts, std::uint64_t n,
                                        const ExactConfig& raw, const Rational& a_n,
                                        const Rational& a_np1) {
  const ExactConfig config = canonical_config(raw);
  const int d = config.d;
  const auto probs = step_distribution_exact(counts, n, config);
  std::vector<Rational> defect(d, Rational(0));
  for (int code = 0; code < 2 * d; ++code) {
    if (probs[code] == 0) continue;
    const SignedDirection dir = SignedDirection::from_code(code);
    for (int i = 1; i <= d; ++i) {
      Rational next_si(static_cast<long>(key_position(counts, i)));
      if (dir.axis == i) next_si += dir.sign;
      defect[i - 1] += probs[code] * (a_np1 * next_si -
                                      a_n * Rational(static_cast<long>(key_position(counts, i))));
    }
  }
  return defect;
}

double to_double(const Rational& r) { return r.get_d(); }

}  // namespace merw::exact
