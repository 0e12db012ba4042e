#include "gclab/proof_games.hpp"

#include <json.hpp>
#include <set>
#include <stdexcept>
#include <utility>

namespace gclab {

namespace {

using u64 = std::uint64_t;
using IndexPairs = std::vector<std::pair<u64, u64>>;

const Element* column_find(const std::vector<std::pair<Element, Element>>& v,
                           bool second, const Element& val) {
  for (const auto& p : v) {
    const Element& probe = second ? p.second : p.first;
    if (probe == val) return second ? &p.first : &p.second;
  }
  return nullptr;
}

Element draw_outside(const Group& g, RandomStream& rng,
                     const std::function<bool(const Element&)>& blocked) {
  for (;;) {
    Element e = g.sample(rng);
    if (!blocked(e)) return e;
  }
}

}  // namespace

void TranscriptSets::add_cipher_pair(const Element& m, const Element& c) {
  if (has_plain(m) || has_cipher(c))
    throw std::logic_error("cipher transcript column repeat");
  cipher_.push_back({m, c});
}

void TranscriptSets::add_perm_pair(const Element& x, const Element& y) {
  if (has_perm_input(x) || has_perm_output(y))
    throw std::logic_error("permutation transcript column repeat");
  perm_.push_back({x, y});
}

bool TranscriptSets::has_plain(const Element& m) const {
  return column_find(cipher_, false, m) != nullptr;
}

bool TranscriptSets::has_cipher(const Element& c) const {
  return column_find(cipher_, true, c) != nullptr;
}

bool TranscriptSets::has_perm_input(const Element& x) const {
  return column_find(perm_, false, x) != nullptr;
}

bool TranscriptSets::has_perm_output(const Element& y) const {
  return column_find(perm_, true, y) != nullptr;
}

std::optional<Element> TranscriptSets::cipher_of(const Element& m) const {
  const Element* hit = column_find(cipher_, false, m);
  return hit ? std::optional<Element>(*hit) : std::nullopt;
}

std::optional<Element> TranscriptSets::plain_of(const Element& c) const {
  const Element* hit = column_find(cipher_, true, c);
  return hit ? std::optional<Element>(*hit) : std::nullopt;
}

std::optional<Element> TranscriptSets::output_of(const Element& x) const {
  const Element* hit = column_find(perm_, false, x);
  return hit ? std::optional<Element>(*hit) : std::nullopt;
}

std::optional<Element> TranscriptSets::input_of(const Element& y) const {
  const Element* hit = column_find(perm_, true, y);
  return hit ? std::optional<Element>(*hit) : std::nullopt;
}

bool is_bad_key(const Element& k, const TranscriptSets& tr) {
  if (k.group == nullptr) throw std::invalid_argument("is_bad_key: detached element");
  const Group& g = *k.group;
  g.require_member(k, "is_bad_key");
  const Element kinv = g.inv(k);
  for (const auto& mc : tr.cipher_pairs())
    for (const auto& xy : tr.perm_pairs())
      if (g.op(mc.first, k) == xy.first || g.op(mc.second, kinv) == xy.second)
        return true;
  return false;
}

std::uint64_t bad_key_count(const GroupRef& group, const TranscriptSets& tr) {
  if (!group) throw std::invalid_argument("bad_key_count: null group");
  std::uint64_t count = 0;
  for (u64 i = 0; i < group->order(); ++i)
    if (is_bad_key(group->element(i), tr)) ++count;
  return count;
}

GameState::GameState(GameKind which, GroupRef group, RandomStream& rng)
    : which_(which), group_(std::move(group)) {
  if (!group_) throw std::invalid_argument("GameState: null group");
  if (which_ != GameKind::RPrime) key_ = group_->sample(rng);
}

void GameState::check_fresh(const GameQuery& q) const {
  bool repeat = false;
  switch (q.kind) {
    case QueryKind::Enc: repeat = visible_.has_plain(q.value); break;
    case QueryKind::Dec: repeat = visible_.has_cipher(q.value); break;
    case QueryKind::PermFwd: repeat = visible_.has_perm_input(q.value); break;
    case QueryKind::PermInv: repeat = visible_.has_perm_output(q.value); break;
  }
  if (repeat) throw std::logic_error("repeated game query");
}

void GameState::record(const GameQuery& q, const Element& answer) {
  switch (q.kind) {
    case QueryKind::Enc: visible_.add_cipher_pair(q.value, answer); break;
    case QueryKind::Dec: visible_.add_cipher_pair(answer, q.value); break;
    case QueryKind::PermFwd: visible_.add_perm_pair(q.value, answer); break;
    case QueryKind::PermInv: visible_.add_perm_pair(answer, q.value); break;
  }
}

Element GameState::step(const GameQuery& q, RandomStream& rng) {
  if (finalized_) throw std::logic_error("game already finalized");
  group_->require_member(q.value, "game step");
  check_fresh(q);
  last_retries_ = 0;
  switch (which_) {
    case GameKind::R:
    case GameKind::RPrime:
      return step_uniform(q, rng);
    case GameKind::X:
      return step_repair(q, rng);
    case GameKind::XPrime:
      return step_table(q, rng);
  }
  throw std::logic_error("unreachable game kind");
}

Element GameState::step_uniform(const GameQuery& q, RandomStream& rng) {
  const Group& g = *group_;
  const bool cipher_side = q.kind == QueryKind::Enc || q.kind == QueryKind::Dec;
  const std::size_t used =
      cipher_side ? visible_.cipher_count() : visible_.perm_count();
  if (used >= g.order()) throw std::logic_error("oracle exhausted the group");
  const Element ans = draw_outside(g, rng, [&](const Element& e) {
    switch (q.kind) {
      case QueryKind::Enc: return visible_.has_cipher(e);
      case QueryKind::Dec: return visible_.has_plain(e);
      case QueryKind::PermFwd: return visible_.has_perm_output(e);
      case QueryKind::PermInv: return visible_.has_perm_input(e);
    }
    return false;
  });
  if (which_ == GameKind::R) {
    const Element& k = *key_;
    const Element kinv = g.inv(k);
    bool bad = false;
    switch (q.kind) {
      case QueryKind::Enc:
        bad = visible_.has_perm_input(g.op(q.value, k)) ||
              visible_.has_perm_output(g.op(ans, kinv));
        break;
      case QueryKind::Dec:
        bad = visible_.has_perm_output(g.op(q.value, kinv)) ||
              visible_.has_perm_input(g.op(ans, k));
        break;
      case QueryKind::PermFwd:
        bad = visible_.has_plain(g.op(q.value, kinv)) ||
              visible_.has_cipher(g.op(ans, k));
        break;
      case QueryKind::PermInv:
        bad = visible_.has_cipher(g.op(q.value, k)) ||
              visible_.has_plain(g.op(ans, kinv));
        break;
    }
    flag_bad_ = flag_bad_ || bad;
  }
  record(q, ans);
  return ans;
}

Element GameState::step_repair(const GameQuery& q, RandomStream& rng) {
  const Group& g = *group_;
  const Element& k = *key_;
  const Element kinv = g.inv(k);
  std::optional<Element> forced;
  switch (q.kind) {
    case QueryKind::Enc:
      if (auto y = visible_.output_of(g.op(q.value, k))) forced = g.op(*y, k);
      break;
    case QueryKind::Dec:
      if (auto x = visible_.input_of(g.op(q.value, kinv))) forced = g.op(*x, kinv);
      break;
    case QueryKind::PermFwd:
      if (auto c = visible_.cipher_of(g.op(q.value, kinv))) forced = g.op(*c, kinv);
      break;
    case QueryKind::PermInv:
      if (auto m = visible_.plain_of(g.op(q.value, k))) forced = g.op(*m, k);
      break;
  }
  if (forced) {
    flag_bad_ = true;
    record(q, *forced);
    return *forced;
  }
  // Each redraw dodges at most one record per recorded pair, so space
  // remains while the records are smaller than the group.
  if (visible_.cipher_count() + visible_.perm_count() >= g.order())
    throw std::logic_error("no admissible answer left");
  for (;;) {
    const Element cand = draw_outside(g, rng, [&](const Element& e) {
      return q.kind == QueryKind::Enc || q.kind == QueryKind::Dec
                 ? (q.kind == QueryKind::Enc ? visible_.has_cipher(e)
                                             : visible_.has_plain(e))
                 : (q.kind == QueryKind::PermFwd ? visible_.has_perm_output(e)
                                                 : visible_.has_perm_input(e));
    });
    bool stale = false;
    switch (q.kind) {
      case QueryKind::Enc: stale = visible_.has_perm_output(g.op(cand, kinv)); break;
      case QueryKind::Dec: stale = visible_.has_perm_input(g.op(cand, k)); break;
      case QueryKind::PermFwd: stale = visible_.has_cipher(g.op(cand, k)); break;
      case QueryKind::PermInv: stale = visible_.has_plain(g.op(cand, kinv)); break;
    }
    if (stale) {
      flag_bad_ = true;
      ++last_retries_;
      continue;
    }
    record(q, cand);
    return cand;
  }
}

Element GameState::step_table(const GameQuery& q, RandomStream& rng) {
  const Group& g = *group_;
  const Element& k = *key_;
  const bool forward =
      q.kind == QueryKind::Enc || q.kind == QueryKind::PermFwd;
  u64 probe = q.value.index;
  if (q.kind == QueryKind::Enc) probe = g.op_index(probe, k.index);
  if (q.kind == QueryKind::Dec)
    probe = g.op_index(probe, g.inv_index(k.index));
  const auto wrap = [&](u64 raw) {
    if (q.kind == QueryKind::Enc) return g.op_index(raw, k.index);
    if (q.kind == QueryKind::Dec) return g.op_index(raw, g.inv_index(k.index));
    return raw;
  };
  const auto& tbl = forward ? table_fwd_ : table_bwd_;
  if (auto it = tbl.find(probe); it != tbl.end()) {
    const Element ans = g.element(wrap(it->second));
    record(q, ans);
    return ans;
  }
  if (table_fwd_.size() >= g.order())
    throw std::logic_error("oracle exhausted the group");
  const Element raw = draw_outside(g, rng, [&](const Element& e) {
    return forward ? table_bwd_.count(e.index) != 0
                   : table_fwd_.count(e.index) != 0;
  });
  if (forward) {
    table_fwd_[probe] = raw.index;
    table_bwd_[raw.index] = probe;
  } else {
    table_fwd_[raw.index] = probe;
    table_bwd_[probe] = raw.index;
  }
  const Element ans = g.element(wrap(raw.index));
  record(q, ans);
  return ans;
}

void GameState::finalize(RandomStream& rng) {
  if (which_ != GameKind::RPrime)
    throw std::logic_error("only the deferred-key game finalizes");
  if (finalized_) throw std::logic_error("game already finalized");
  key_ = group_->sample(rng);
  flag_bad_ = is_bad_key(*key_, visible_);
  finalized_ = true;
}

std::vector<ScriptedAdversary> script_catalog() {
  std::vector<ScriptedAdversary> out;
  const auto add = [&](std::string name, QueryKind first, u64 first_index,
                       QueryKind second, std::function<u64(const Group&, u64)> pick) {
    out.push_back(
        {std::move(name),
         [first, first_index, second, pick = std::move(pick)](
             const GroupRef& g, const std::vector<Element>& answers)
             -> std::optional<GameQuery> {
           if (answers.empty()) return GameQuery{first, g->element(first_index)};
           if (answers.size() == 1)
             return GameQuery{second, g->element(pick(*g, answers[0].index))};
           return std::nullopt;
         }});
  };
  const auto same = [](const Group&, u64 idx) { return idx; };
  const auto next_to = [](const Group& g, u64 idx) {
    return (idx + 1) % g.order();
  };
  const auto one = [](const Group&, u64) { return u64{1}; };

  add("enc-enc", QueryKind::Enc, 0, QueryKind::Enc, one);
  add("enc-dec", QueryKind::Enc, 0, QueryKind::Dec, next_to);
  add("enc-perm", QueryKind::Enc, 0, QueryKind::PermFwd, same);
  add("enc-perminv", QueryKind::Enc, 0, QueryKind::PermInv, same);
  add("perm-enc", QueryKind::PermFwd, 0, QueryKind::Enc, same);
  add("perm-perminv", QueryKind::PermFwd, 0, QueryKind::PermInv, next_to);
  add("dec-perm", QueryKind::Dec, 0, QueryKind::PermFwd, same);
  add("perminv-dec", QueryKind::PermInv, 0, QueryKind::Dec, same);
  return out;
}

namespace {

// Shape shared by every query kind: which record the pair joins, which
// slot the answer fills, and whether probing shifts the queried value by
// the key (else by its inverse).  The candidate answer is always probed
// with the opposite shift against the opposite slot.
struct StepRole {
  bool to_cipher;
  bool answer_second;
  bool key_right;
};

StepRole role_of(QueryKind kind) {
  switch (kind) {
    case QueryKind::Enc: return {true, true, true};
    case QueryKind::Dec: return {true, false, false};
    case QueryKind::PermFwd: return {false, true, false};
    case QueryKind::PermInv: return {false, false, true};
  }
  throw std::logic_error("unreachable query kind");
}

bool index_column_has(const IndexPairs& v, bool second, u64 val) {
  for (const auto& p : v)
    if ((second ? p.second : p.first) == val) return true;
  return false;
}

const std::pair<u64, u64>* index_column_find(const IndexPairs& v, bool second,
                                             u64 val) {
  for (const auto& p : v)
    if ((second ? p.second : p.first) == val) return &p;
  return nullptr;
}

struct ExactCtx {
  GameKind which;
  GroupRef group;
  const ScriptedAdversary* adv;
  u64 order;
  u64 key;
  TranscriptDist* dist;
  Rational* bad;
};

struct ExactState {
  IndexPairs s;
  IndexPairs t;
  std::map<u64, u64> tbl_fwd;
  std::map<u64, u64> tbl_bwd;
  std::vector<u64> answers;
  bool flag = false;
};

void append_pair(ExactState& st, const StepRole& role, u64 query, u64 ans) {
  IndexPairs& own = role.to_cipher ? st.s : st.t;
  const u64 first = role.answer_second ? query : ans;
  const u64 second = role.answer_second ? ans : query;
  if (index_column_has(own, false, first) || index_column_has(own, true, second))
    throw std::logic_error("transcript column repeat");
  own.push_back({first, second});
}

void walk(const ExactCtx& ctx, const ExactState& st, const Rational& prob);

void settle(const ExactCtx& ctx, const ExactState& st, const Rational& prob) {
  if (ctx.dist) (*ctx.dist)[st.answers] += prob;
  if (!ctx.bad) return;
  if (ctx.which != GameKind::RPrime) {
    if (st.flag) *ctx.bad += prob;
    return;
  }
  const Group& g = *ctx.group;
  u64 bad_keys = 0;
  for (u64 k = 0; k < ctx.order; ++k) {
    bool hit = false;
    for (const auto& mc : st.s) {
      for (const auto& xy : st.t) {
        if (g.op_index(mc.first, k) == xy.first ||
            g.op_index(mc.second, g.inv_index(k)) == xy.second) {
          hit = true;
          break;
        }
      }
      if (hit) break;
    }
    if (hit) ++bad_keys;
  }
  if (bad_keys > 0) *ctx.bad += prob * Rational(bad_keys, ctx.order);
}

void branch_uniform(const ExactCtx& ctx, const ExactState& st,
                    const Rational& prob, const StepRole& role, u64 v) {
  const Group& g = *ctx.group;
  const IndexPairs& own = role.to_cipher ? st.s : st.t;
  const IndexPairs& other = role.to_cipher ? st.t : st.s;
  const bool track = ctx.which == GameKind::R;
  const u64 kinv = g.inv_index(ctx.key);
  const u64 probe = role.key_right ? g.op_index(v, ctx.key) : g.op_index(v, kinv);
  const bool probe_hit =
      track && index_column_has(other, !role.answer_second, probe);
  const u64 n = ctx.order - own.size();
  const Rational share = prob / n;
  for (u64 ans = 0; ans < ctx.order; ++ans) {
    if (index_column_has(own, role.answer_second, ans)) continue;
    ExactState child = st;
    if (track) {
      const u64 back =
          role.key_right ? g.op_index(ans, kinv) : g.op_index(ans, ctx.key);
      child.flag = st.flag || probe_hit ||
                   index_column_has(other, role.answer_second, back);
    }
    append_pair(child, role, v, ans);
    child.answers.push_back(ans);
    walk(ctx, child, share);
  }
}

void branch_repair(const ExactCtx& ctx, const ExactState& st,
                   const Rational& prob, const StepRole& role, u64 v) {
  const Group& g = *ctx.group;
  const IndexPairs& own = role.to_cipher ? st.s : st.t;
  const IndexPairs& other = role.to_cipher ? st.t : st.s;
  const u64 kinv = g.inv_index(ctx.key);
  const u64 probe = role.key_right ? g.op_index(v, ctx.key) : g.op_index(v, kinv);
  if (const auto* hit = index_column_find(other, !role.answer_second, probe)) {
    const u64 counterpart = role.answer_second ? hit->second : hit->first;
    const u64 ans = role.key_right ? g.op_index(counterpart, ctx.key)
                                   : g.op_index(counterpart, kinv);
    ExactState child = st;
    child.flag = true;
    append_pair(child, role, v, ans);
    child.answers.push_back(ans);
    walk(ctx, child, prob);
    return;
  }
  const u64 n = ctx.order - own.size();
  std::vector<u64> allowed;
  for (u64 ans = 0; ans < ctx.order; ++ans) {
    if (index_column_has(own, role.answer_second, ans)) continue;
    const u64 back =
        role.key_right ? g.op_index(ans, kinv) : g.op_index(ans, ctx.key);
    if (index_column_has(other, role.answer_second, back)) continue;
    allowed.push_back(ans);
  }
  if (allowed.empty()) throw std::logic_error("no admissible answer left");
  const u64 rejectable = n - allowed.size();
  const Rational direct = prob / n;
  const Rational after_retry =
      rejectable > 0 ? prob * Rational(rejectable, n * allowed.size())
                     : Rational(0);
  for (u64 ans : allowed) {
    ExactState child = st;
    append_pair(child, role, v, ans);
    child.answers.push_back(ans);
    walk(ctx, child, direct);
    if (rejectable > 0) {
      ExactState retried = child;
      retried.flag = true;
      walk(ctx, retried, after_retry);
    }
  }
}

void branch_table(const ExactCtx& ctx, const ExactState& st,
                  const Rational& prob, const StepRole& role, QueryKind kind,
                  u64 v) {
  const Group& g = *ctx.group;
  const bool forward = kind == QueryKind::Enc || kind == QueryKind::PermFwd;
  const u64 kinv = g.inv_index(ctx.key);
  u64 probe = v;
  if (kind == QueryKind::Enc) probe = g.op_index(v, ctx.key);
  if (kind == QueryKind::Dec) probe = g.op_index(v, kinv);
  const auto wrap = [&](u64 raw) {
    if (kind == QueryKind::Enc) return g.op_index(raw, ctx.key);
    if (kind == QueryKind::Dec) return g.op_index(raw, kinv);
    return raw;
  };
  const auto& tbl = forward ? st.tbl_fwd : st.tbl_bwd;
  if (auto it = tbl.find(probe); it != tbl.end()) {
    ExactState child = st;
    const u64 ans = wrap(it->second);
    append_pair(child, role, v, ans);
    child.answers.push_back(ans);
    walk(ctx, child, prob);
    return;
  }
  const u64 n = ctx.order - st.tbl_fwd.size();
  if (n == 0) throw std::logic_error("oracle exhausted the group");
  const Rational share = prob / n;
  for (u64 raw = 0; raw < ctx.order; ++raw) {
    if (forward ? st.tbl_bwd.count(raw) != 0 : st.tbl_fwd.count(raw) != 0)
      continue;
    ExactState child = st;
    if (forward) {
      child.tbl_fwd[probe] = raw;
      child.tbl_bwd[raw] = probe;
    } else {
      child.tbl_fwd[raw] = probe;
      child.tbl_bwd[probe] = raw;
    }
    const u64 ans = wrap(raw);
    append_pair(child, role, v, ans);
    child.answers.push_back(ans);
    walk(ctx, child, share);
  }
}

void walk(const ExactCtx& ctx, const ExactState& st, const Rational& prob) {
  std::vector<Element> answers;
  answers.reserve(st.answers.size());
  for (u64 a : st.answers) answers.push_back(ctx.group->element(a));
  const auto q = ctx.adv->next(ctx.group, answers);
  if (!q) {
    settle(ctx, st, prob);
    return;
  }
  ctx.group->require_member(q->value, "exact game enumeration");
  const StepRole role = role_of(q->kind);
  const IndexPairs& own = role.to_cipher ? st.s : st.t;
  if (index_column_has(own, !role.answer_second, q->value.index))
    throw std::logic_error("repeated game query");
  switch (ctx.which) {
    case GameKind::R:
    case GameKind::RPrime:
      branch_uniform(ctx, st, prob, role, q->value.index);
      return;
    case GameKind::X:
      branch_repair(ctx, st, prob, role, q->value.index);
      return;
    case GameKind::XPrime:
      branch_table(ctx, st, prob, role, q->kind, q->value.index);
      return;
  }
}

void run_exact(GameKind which, const ScriptedAdversary& adv,
               const GroupRef& group, TranscriptDist* dist, Rational* bad) {
  if (!group) throw std::invalid_argument("exact game enumeration: null group");
  if (group->order() > kExactGameOrderCap)
    throw std::length_error("exact game enumeration needs a tiny group");
  ExactCtx ctx{which, group, &adv, group->order(), 0, dist, bad};
  const ExactState start;
  if (which == GameKind::RPrime) {
    walk(ctx, start, Rational(1));
    return;
  }
  const Rational share(1, group->order());
  for (u64 k = 0; k < ctx.order; ++k) {
    ctx.key = k;
    walk(ctx, start, share);
  }
}

}  // namespace

TranscriptDist transcript_distribution(GameKind which,
                                       const ScriptedAdversary& adv,
                                       const GroupRef& group) {
  TranscriptDist dist;
  run_exact(which, adv, group, &dist, nullptr);
  return dist;
}

Rational bad_probability(GameKind which, const ScriptedAdversary& adv,
                         const GroupRef& group) {
  if (which == GameKind::XPrime)
    throw std::invalid_argument("the table game keeps no flag");
  Rational bad(0);
  run_exact(which, adv, group, nullptr, &bad);
  return bad;
}

bool consistent_transcript(const PsiTranscript& sigma) {
  std::set<std::pair<u64, u64>> xs;
  std::set<std::pair<u64, u64>> ys;
  for (const auto& p : sigma.cipher) {
    if (!xs.insert({p.x.left.index, p.x.right.index}).second) return false;
    if (!ys.insert({p.y.left.index, p.y.right.index}).second) return false;
  }
  std::set<u64> fs;
  for (const auto& q : sigma.f_pairs)
    if (!fs.insert(q.first.index).second) return false;
  std::set<u64> gs;
  for (const auto& q : sigma.g_pairs)
    if (!gs.insert(q.first.index).second) return false;
  return true;
}

PsiTranscript random_psi_transcript(const GroupRef& half, std::size_t q_c,
                                    std::size_t q_f, std::size_t q_g,
                                    RandomStream& rng) {
  if (!half) throw std::invalid_argument("random_psi_transcript: null group");
  const Group& g = *half;
  const u64 n = g.order();
  if (q_c > n * n || q_f > n || q_g > n)
    throw std::invalid_argument("more queries than fresh inputs");
  PsiTranscript tr{half, {}, {}, {}};
  std::set<std::pair<u64, u64>> xs;
  std::set<std::pair<u64, u64>> ys;
  const auto fresh_state = [&](std::set<std::pair<u64, u64>>& used) {
    for (;;) {
      FeistelState s{g.sample(rng), g.sample(rng)};
      if (used.insert({s.left.index, s.right.index}).second) return s;
    }
  };
  for (std::size_t i = 0; i < q_c; ++i) {
    const PsiDir dir = i % 2 == 0 ? PsiDir::Forward : PsiDir::Backward;
    const FeistelState x = fresh_state(xs);
    const FeistelState y = fresh_state(ys);
    tr.cipher.push_back({dir, x, y});
  }
  const auto fresh_elem = [&](std::set<u64>& used) {
    for (;;) {
      Element e = g.sample(rng);
      if (used.insert(e.index).second) return e;
    }
  };
  std::set<u64> fin;
  for (std::size_t j = 0; j < q_f; ++j)
    tr.f_pairs.push_back({fresh_elem(fin), g.sample(rng)});
  std::set<u64> gin;
  for (std::size_t j = 0; j < q_g; ++j)
    tr.g_pairs.push_back({fresh_elem(gin), g.sample(rng)});
  return tr;
}

PsiMiddleInputs psi_middle_inputs(const PsiTranscript& sigma, const PsiKey& k,
                                  LazyFunction& g) {
  if (!sigma.half) throw std::invalid_argument("psi transcript: null group");
  const Group& h = *sigma.half;
  PsiMiddleInputs out;
  out.round2.reserve(sigma.cipher.size());
  out.round3.reserve(sigma.cipher.size());
  for (const auto& p : sigma.cipher) {
    const Element first_in = h.op(p.x.right, k.right);
    const Element last_in = h.op(p.y.left, h.inv(k.left));
    out.round2.push_back(h.op(h.op(p.x.left, k.left), g.eval(first_in)));
    out.round3.push_back(
        h.op(h.op(p.y.right, h.inv(k.right)), h.inv(g.eval(last_in))));
  }
  return out;
}

bool badg_detect(const PsiTranscript& sigma, const PsiKey& k) {
  if (!sigma.half) throw std::invalid_argument("psi transcript: null group");
  const Group& h = *sigma.half;
  for (const auto& p : sigma.cipher) {
    const Element fwd = h.op(p.x.right, k.right);
    const Element bwd = h.op(p.y.left, h.inv(k.left));
    for (const auto& gq : sigma.g_pairs)
      if (gq.first == fwd || gq.first == bwd) return true;
  }
  return false;
}

bool bad_detect(const PsiTranscript& sigma, const PsiKey& k, LazyFunction& g) {
  const PsiMiddleInputs mids = psi_middle_inputs(sigma, k, g);
  const std::size_t n = mids.round2.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j)
      if (mids.round2[i] == mids.round2[j] || mids.round3[i] == mids.round3[j])
        return true;
    for (std::size_t j = 0; j < n; ++j)
      if (mids.round2[i] == mids.round3[j]) return true;
    for (const auto& fq : sigma.f_pairs)
      if (fq.first == mids.round2[i] || fq.first == mids.round3[i]) return true;
  }
  return false;
}

bool psi_explains_transcript(const PsiTranscript& sigma, const PsiKey& k,
                             LazyFunction& g) {
  if (!sigma.half) throw std::invalid_argument("psi transcript: null group");
  const Group& h = *sigma.half;
  const PsiMiddleInputs mids = psi_middle_inputs(sigma, k, g);
  std::map<u64, u64> f;
  const auto define = [&](const Element& in, const Element& out) {
    const auto [it, inserted] = f.insert({in.index, out.index});
    return inserted || it->second == out.index;
  };
  for (std::size_t i = 0; i < sigma.cipher.size(); ++i) {
    const auto& p = sigma.cipher[i];
    // Solves the two middle rounds for f: the round-2 output must carry
    // the right half onto the round-3 input, and the round-3 output must
    // land the left half on the recorded answer.
    const Element out2 =
        h.op(h.op(h.inv(k.right), h.inv(p.x.right)), mids.round3[i]);
    const Element out3 =
        h.op(h.op(h.inv(mids.round2[i]), p.y.left), h.inv(k.left));
    if (!define(mids.round2[i], out2)) return false;
    if (!define(mids.round3[i], out3)) return false;
  }
  for (const auto& fq : sigma.f_pairs)
    if (!define(fq.first, fq.second)) return false;
  for (const auto& p : sigma.cipher) {
    const Element u0 = h.op(p.x.left, k.left);
    const Element v0 = h.op(p.x.right, k.right);
    const Element v1 = h.op(u0, g.eval(v0));
    const auto f1 = f.find(v1.index);
    if (f1 == f.end()) return false;
    const Element v2 = h.op(v0, h.element(f1->second));
    const auto f2 = f.find(v2.index);
    if (f2 == f.end()) return false;
    const Element v3 = h.op(v1, h.element(f2->second));
    const Element v4 = h.op(v2, g.eval(v3));
    if (h.op(v3, k.left) != p.y.left || h.op(v4, k.right) != p.y.right)
      return false;
  }
  return true;
}

RTildeOracle::RTildeOracle(GroupRef half) : half_(std::move(half)) {
  if (!half_) throw std::invalid_argument("RTildeOracle: null group");
}

FeistelState RTildeOracle::query(PsiDir dir, const FeistelState& v,
                                 RandomStream& rng) {
  half_->require_member(v.left, "rtilde query");
  half_->require_member(v.right, "rtilde query");
  if (dir == PsiDir::Forward) {
    for (const auto& p : pairs_)
      if (p.x == v) {
        const FeistelState y = p.y;  // push_back may reallocate
        pairs_.push_back({dir, v, y});
        return y;
      }
    const FeistelState y{half_->sample(rng), half_->sample(rng)};
    for (const auto& p : pairs_) inconsistent_ = inconsistent_ || p.y == y;
    pairs_.push_back({dir, v, y});
    return y;
  }
  for (const auto& p : pairs_)
    if (p.y == v) {
      const FeistelState x = p.x;  // push_back may reallocate
      pairs_.push_back({dir, x, v});
      return x;
    }
  const FeistelState x{half_->sample(rng), half_->sample(rng)};
  for (const auto& p : pairs_) inconsistent_ = inconsistent_ || p.x == x;
  pairs_.push_back({dir, x, v});
  return x;
}

Rational psi_bound_stated(std::uint64_t q_c, std::uint64_t q_f,
                          std::uint64_t q_g, std::uint64_t order) {
  if (order == 0) throw std::invalid_argument("order must be positive");
  const Rational n(order);
  const Rational qc(q_c), qf(q_f), qg(q_g);
  const Rational pairs = qc * qc - qc;
  const Rational lead = 3 * qc * qc - qc + 4 * qf * qc + 4 * qg * qc;
  return lead / n + pairs * (2 / n + 1 / (n * n));
}

Rational psi_bound_accumulated(std::uint64_t q_c, std::uint64_t q_f,
                               std::uint64_t q_g, std::uint64_t order) {
  if (order == 0) throw std::invalid_argument("order must be positive");
  const Rational n(order);
  const Rational qc(q_c), qf(q_f), qg(q_g);
  const Rational pairs = qc * qc - qc;
  const Rational lead = 4 * qc * qc - 2 * qc + 4 * qf * qc + 4 * qg * qc;
  return lead / n + pairs * (2 / n + 1 / (n * n));
}

Rational psi_bound_total(std::uint64_t q, std::uint64_t order) {
  if (order == 0) throw std::invalid_argument("order must be positive");
  const Rational n(order);
  const Rational qq(q);
  return 2 * (3 * qq * qq - 2 * qq) / n + (qq * qq - qq) / (n * n);
}

Rational em_sprp_bound(std::uint64_t s, std::uint64_t t, std::uint64_t order) {
  if (order == 0) throw std::invalid_argument("order must be positive");
  return Rational(s) * t * 2 / order;
}

std::string to_json(const LemmaReport& r) {
  const nlohmann::json j{{"lemma", r.lemma},   {"instance", r.instance},
                         {"lhs", r.lhs},       {"rhs", r.rhs},
                         {"bound", r.bound},   {"verdict", r.verdict}};
  return j.dump();
}

}  // namespace gclab
