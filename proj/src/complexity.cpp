#include "jiofilt/harness.hpp"

#include "jiofilt/rng.hpp"

namespace jio {

namespace {

long long sq(long long v) { return v * v; }

}  // namespace

std::vector<ComplexityRow> complexity_table(int m, int d, MwfComplexityForm form) {
  if (m < 1 || d < 1 || d > m) {
    throw std::invalid_argument("complexity_table: need M >= D >= 1");
  }
  const long long M = m;
  const long long D = d;
  std::vector<ComplexityRow> rows;

  rows.push_back({"fullrank-nlms", 3 * M - 1, 3 * M + 2});
  rows.push_back({"fullrank-rls", 3 * sq(M - 1) + sq(M) + 2 * M, 6 * sq(M) + 2 * M + 2});
  rows.push_back({"jio-nlms", 2 * D * M + M + 4 * D - 2, 3 * D * M + M + 3 * D + 6});

  long long mwf_nlms_a = 0;
  long long mwf_nlms_m = 0;
  long long mwf_rls_a = 0;
  long long mwf_rls_m = 0;
  if (form == MwfComplexityForm::per_stage_sum) {
    // Stage dimension shrinks with the rank index: Mbar = M - d.
    for (long long stage = 1; stage <= D; ++stage) {
      const long long mb = M - stage;
      mwf_nlms_a += 2 * sq(mb) - 3 * mb + 1;
      mwf_nlms_m += 2 * sq(mb) + 5 * mb + 7;
      mwf_rls_a += 4 * sq(mb - 1) + 2 * mb;
      mwf_rls_m += 4 * sq(mb) + 2 * mb + 3;
    }
  } else {
    const long long mb = M - D;
    mwf_nlms_a = D * (2 * sq(mb) - 3 * mb + 1);
    mwf_nlms_m = D * (2 * sq(mb) + 5 * mb + 7);
    mwf_rls_a = D * (4 * sq(mb - 1) + 2 * mb);
    mwf_rls_m = D * (4 * sq(mb) + 2 * mb + 3);
  }
  rows.push_back({"mwf-nlms", mwf_nlms_a, mwf_nlms_m});
  rows.push_back({"mwf-rls", mwf_rls_a, mwf_rls_m});

  rows.push_back({"avf",
                  D * (sq(M) + 3 * sq(M - 1)) - 1 + D * (5 * (M - 1) + 1) + 2 * M,
                  D * (4 * sq(M) + 4 * M + 1) + 4 * M + 2});
  return rows;
}

OpCount expected_measured_counts(const std::string& algorithm, int m, int d) {
  const unsigned long long M = static_cast<unsigned long long>(m);
  const unsigned long long D = static_cast<unsigned long long>(d);
  OpCount c;
  if (algorithm == "fullrank_nlms") {
    c.adds = 3 * M - 1;
    c.mults = 3 * M + 2;
  } else if (algorithm == "jio_nlms") {
    c.adds = 2 * D * M + M + 2 * D - 2;
    c.mults = 3 * D * M + M + 3 * D + 5;
  } else if (algorithm == "fullrank_rls") {
    c.adds = 3 * M * M + 2 * M;
    c.mults = 4 * M * M + 4 * M;
  } else {
    throw std::invalid_argument("expected_measured_counts: no closed form for " + algorithm);
  }
  return c;
}

CountVerification count_verify(const std::string& algorithm, int m, int d) {
  if (m < 1 || d < 1 || d > m) {
    throw std::invalid_argument("count_verify: need M >= D >= 1");
  }
  Rng rng(0xC0DE);
  auto sample = [&]() {
    SymbolSample s;
    s.r = rng.cgaussian_vector(m);
    s.d = rng.sign();
    return s;
  };

  std::string table_name;
  OpCount measured;
  if (algorithm == "fullrank_nlms") {
    table_name = "fullrank-nlms";
    FullRankNlmsState st = FullRankNlmsState::initial(m);
    measured = fullrank_nlms_update_counted(st, sample());
  } else if (algorithm == "fullrank_rls") {
    table_name = "fullrank-rls";
    FullRankRlsState st = FullRankRlsState::initial(m);
    measured = fullrank_rls_update_counted(st, sample());
  } else if (algorithm == "jio_nlms") {
    table_name = "jio-nlms";
    JioState st = JioState::initial(m, d);
    // Warm one symbol so w_bar is nonzero and the projection update runs.
    st.update(sample());
    measured = jio_update_counted(st, sample());
  } else if (algorithm == "mwf_nlms") {
    table_name = "mwf-nlms";
    MwfNlmsState st = MwfNlmsState::initial(m, d);
    st.rebuild_every = 1;  // measure the rebuild symbol, the worst case
    for (int warm = 0; warm < d + 2; ++warm) st.update(sample());
    measured = mwf_update_counted(st, sample());
  } else {
    throw std::invalid_argument("count_verify: unsupported algorithm " + algorithm);
  }

  CountVerification out{measured, 0, 0};
  for (const ComplexityRow& row : complexity_table(m, d)) {
    if (row.algorithm == table_name) {
      out.table_adds = row.additions;
      out.table_mults = row.multiplications;
      return out;
    }
  }
  throw std::logic_error("count_verify: table row missing for " + table_name);
}

}  // namespace jio
