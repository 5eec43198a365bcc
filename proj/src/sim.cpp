#include "overload/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <set>
#include <thread>

#include "overload/error.hpp"
#include "overload/serialize.hpp"

namespace overload::sim {

namespace {

constexpr TimeMs kEdaPeriodMs = 10;
constexpr TimeMs kPointerPeriodMs = 16;
constexpr double kScreenHeight = 1080.0;

constexpr std::array<std::string_view, 20> kConcepts = {
    "photosynthesis", "impressionism",    "tectonic plates",  "the Treaty of Westphalia",
    "mitochondria",   "a prime number",   "the Reformation",  "baroque architecture",
    "insulin",        "the equator",      "parliamentary democracy", "a haiku",
    "the Silk Road",  "an algorithm",     "cholesterol",      "the Renaissance",
    "a monsoon",      "the Pythagorean theorem", "Buddhism",  "a transistor"};

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool bernoulli(Rng& rng, double p) {
  return std::bernoulli_distribution(std::clamp(p, 0.0, 1.0))(rng);
}

int poisson(Rng& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  return std::poisson_distribution<int>(mean)(rng);
}

TimeMs uniform_ms(Rng& rng, TimeMs lo, TimeMs hi) {
  return std::uniform_int_distribution<TimeMs>(lo, hi)(rng);
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(Errc::ConfigError, std::string(name) + " must be a probability");
  }
}

// Pointer trace builder: emits an event every kPointerPeriodMs while moving.
class PointerPath {
 public:
  PointerPath(TimeMs t0, double x, double y) : t_(t0), x_(x), y_(y) { emit(); }

  TimeMs now() const { return t_; }
  double y() const { return y_; }

  void move_to(double x, double y, double speed_px_per_ms) {
    const double dist = std::hypot(x - x_, y - y_);
    const auto steps = std::max<TimeMs>(
        1, static_cast<TimeMs>(std::ceil(dist / speed_px_per_ms / kPointerPeriodMs)));
    const double x0 = x_;
    const double y0 = y_;
    for (TimeMs k = 1; k <= steps; ++k) {
      const double f = static_cast<double>(k) / static_cast<double>(steps);
      t_ += kPointerPeriodMs;
      x_ = std::round(x0 + (x - x0) * f);
      y_ = std::round(y0 + (y - y0) * f);
      emit();
    }
  }

  void wait(TimeMs ms) { t_ += ms; }

  std::vector<PointerEvent> take() { return std::move(events_); }

 private:
  void emit() { events_.push_back({t_, x_, y_, kNoTrial, kNoTrial}); }

  TimeMs t_;
  double x_;
  double y_;
  std::vector<PointerEvent> events_;
};

enum class Action { Sweep, Hover, Pause, Wiggle };

}  // namespace

void validate(const RespondentProfile& p) {
  check_probability(p.p_correct_easy, "p_correct_easy");
  check_probability(p.p_correct_hard, "p_correct_hard");
  check_probability(p.p_accept_given_need, "p_accept_given_need");
  check_probability(p.p_accept_given_no_need, "p_accept_given_no_need");
  check_probability(std::abs(p.help_boost), "help_boost");
  if (p.p_correct_easy < p.p_correct_hard) {
    throw Error(Errc::ConfigError, "p_correct_easy must be >= p_correct_hard");
  }
  if (!(p.load_sigma >= 0.0)) throw Error(Errc::ConfigError, "load_sigma must be >= 0");
}

RespondentProfile parse_profile(const std::string& json_text) {
  const Json j = parse_json(json_text, "profile");
  if (!j.is_object()) throw Error(Errc::ConfigError, "profile must be a JSON object");
  static const std::set<std::string> known = {
      "p_correct_easy", "p_correct_hard",         "load_mu_easy", "load_mu_hard",
      "load_sigma",     "need_threshold",         "p_accept_given_need",
      "p_accept_given_no_need", "help_boost",     "rng_seed"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw Error(Errc::ConfigError, "unknown profile field '" + key + "'");
  }
  RespondentProfile p;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("p_correct_easy", p.p_correct_easy);
    get("p_correct_hard", p.p_correct_hard);
    get("load_mu_easy", p.load_mu_easy);
    get("load_mu_hard", p.load_mu_hard);
    get("load_sigma", p.load_sigma);
    get("need_threshold", p.need_threshold);
    get("p_accept_given_need", p.p_accept_given_need);
    get("p_accept_given_no_need", p.p_accept_given_no_need);
    get("help_boost", p.help_boost);
    get("rng_seed", p.rng_seed);
  } catch (const Json::exception& e) {
    throw Error(Errc::ConfigError, std::string("profile: ") + e.what());
  }
  validate(p);
  return p;
}

RespondentProfile load_profile(const std::filesystem::path& path) {
  try {
    return parse_profile(read_text_file(path));
  } catch (const Error& e) {
    if (e.code() == Errc::ConfigError) {
      throw Error(Errc::ConfigError, path.string() + ": " + e.what());
    }
    throw;
  }
}

std::string to_json_string(const RespondentProfile& p) {
  return Json{{"p_correct_easy", p.p_correct_easy},
              {"p_correct_hard", p.p_correct_hard},
              {"load_mu_easy", p.load_mu_easy},
              {"load_mu_hard", p.load_mu_hard},
              {"load_sigma", p.load_sigma},
              {"need_threshold", p.need_threshold},
              {"p_accept_given_need", p.p_accept_given_need},
              {"p_accept_given_no_need", p.p_accept_given_no_need},
              {"help_boost", p.help_boost},
              {"rng_seed", p.rng_seed}}
      .dump(2);
}

double correct_probability(const RespondentProfile& p, double latent_load) {
  const double span = p.load_mu_hard - p.load_mu_easy;
  if (span == 0.0) return p.p_correct_easy;
  const double frac = (latent_load - p.load_mu_easy) / span;
  return std::clamp(p.p_correct_easy + (p.p_correct_hard - p.p_correct_easy) * frac, 0.0, 1.0);
}

int self_report(double latent_load) {
  return static_cast<int>(std::clamp(std::round(latent_load), 1.0, 7.0));
}

BlockPlan make_block(Condition condition, Rng& rng) {
  BlockPlan b;
  b.condition = condition;
  b.n_trials = kTrialsPerBlock;
  b.difficulty_sequence.assign(kTrialsPerBlock / 2, 0);
  b.difficulty_sequence.resize(kTrialsPerBlock, 1);
  std::shuffle(b.difficulty_sequence.begin(), b.difficulty_sequence.end(), rng);
  return b;
}

std::vector<BlockPlan> default_plan(Rng& rng) {
  std::vector<Strategy> order = {Strategy::Aligned, Strategy::Misaligned, Strategy::Random};
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<BlockPlan> plan;
  plan.push_back(make_block(std::nullopt, rng));
  for (Strategy s : order) plan.push_back(make_block(s, rng));
  return plan;
}

void validate(std::span<const BlockPlan> plan) {
  if (plan.empty()) throw Error(Errc::InvalidPlan, "plan has no blocks");
  if (plan.front().condition.has_value()) {
    throw Error(Errc::InvalidPlan, "plan must begin with a calibration block");
  }
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& b = plan[i];
    if (i > 0 && !b.condition) {
      throw Error(Errc::InvalidPlan, "only the first block may be a calibration block");
    }
    if (b.n_trials != kTrialsPerBlock ||
        b.difficulty_sequence.size() != static_cast<std::size_t>(b.n_trials)) {
      throw Error(Errc::InvalidPlan, "blocks have 20 trials with one difficulty each");
    }
    const auto hard = std::count(b.difficulty_sequence.begin(), b.difficulty_sequence.end(), 1);
    const auto easy = std::count(b.difficulty_sequence.begin(), b.difficulty_sequence.end(), 0);
    if (hard != easy) throw Error(Errc::InvalidPlan, "block difficulty is not counterbalanced");
  }
}

TrialTrace synth_trial_trace(const RespondentProfile& profile, const TrialSpec& spec, Rng& rng,
                             TraceContext ctx) {
  TrialTrace trace;
  const double mu = spec.difficulty == 1 ? profile.load_mu_hard : profile.load_mu_easy;
  trace.latent_load =
      profile.load_sigma > 0.0 ? std::normal_distribution<double>(mu, profile.load_sigma)(rng) : mu;
  const double load = std::max(trace.latent_load, 0.0);

  // Pointer: a shuffled sequence of vertical sweeps, hovers, short pauses
  // and small horizontal adjustments.
  std::vector<Action> actions;
  actions.insert(actions.end(), static_cast<std::size_t>(poisson(rng, 2.0 * load)), Action::Sweep);
  actions.insert(actions.end(), static_cast<std::size_t>(poisson(rng, load)), Action::Hover);
  actions.insert(actions.end(), static_cast<std::size_t>(poisson(rng, 3.0)), Action::Pause);
  actions.insert(actions.end(), static_cast<std::size_t>(poisson(rng, 2.0)), Action::Wiggle);
  std::shuffle(actions.begin(), actions.end(), rng);

  // Reading time before the cursor first moves; its position is unknown
  // until then.
  const TimeMs t0 = ctx.t_start_ms + uniform_ms(rng, 1500, 3000) + static_cast<TimeMs>(300.0 * load);
  double x = std::round(uniform(rng, 400.0, 1400.0));
  PointerPath path(t0, x, std::round(uniform(rng, 400.0, 680.0)));
  int dir = bernoulli(rng, 0.5) ? 1 : -1;
  for (Action a : actions) {
    switch (a) {
      case Action::Sweep: {
        const double amp = uniform(rng, 120.0, 320.0);
        double target = path.y() + dir * amp;
        if (target < 40.0 || target > kScreenHeight - 40.0) {
          dir = -dir;
          target = path.y() + dir * amp;
        }
        target = std::clamp(target, 40.0, kScreenHeight - 40.0);
        path.move_to(x, target, uniform(rng, 0.8, 1.6));
        dir = -dir;
        break;
      }
      case Action::Hover:
        path.wait(uniform_ms(rng, 600, 1800));
        x += 1.0;  // leave the rest position with a one-pixel nudge
        path.move_to(x, path.y(), 1.0);
        break;
      case Action::Pause:
        path.wait(uniform_ms(rng, 50, 400));
        break;
      case Action::Wiggle:
        x = std::round(x + uniform(rng, -80.0, 80.0));
        path.move_to(x, path.y(), uniform(rng, 0.5, 1.2));
        break;
    }
  }
  // Final move to the answer option.
  path.wait(uniform_ms(rng, 100, 400));
  x = std::round(x + uniform(rng, 20.0, 120.0));
  path.move_to(x, path.y(), 1.0);
  trace.pointer = path.take();

  const TimeMs t_end = path.now() + uniform_ms(rng, 20, 200);
  trace.duration_ms = t_end - ctx.t_start_ms;

  // EDA: tonic ramp proportional to load plus measurement noise.
  const double drift = (0.6 + std::normal_distribution<double>(0.0, 0.04)(rng)) * load;
  std::normal_distribution<double> noise(0.0, 0.01);
  for (TimeMs t = ctx.t_start_ms; t < t_end; t += kEdaPeriodMs) {
    const double frac = static_cast<double>(t - ctx.t_start_ms) / static_cast<double>(trace.duration_ms);
    trace.eda.push_back({t, ctx.tonic_level + drift * frac + noise(rng), kNoTrial, kNoTrial});
  }
  return trace;
}

std::vector<ingest::IngestMessage> merge_streams(const TrialTrace& trace) {
  std::vector<ingest::IngestMessage> out;
  out.reserve(trace.eda.size() + trace.pointer.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < trace.eda.size() || j < trace.pointer.size()) {
    if (j == trace.pointer.size() ||
        (i < trace.eda.size() && trace.eda[i].t_ms <= trace.pointer[j].t_ms)) {
      out.emplace_back(trace.eda[i++]);
    } else {
      out.emplace_back(trace.pointer[j++]);
    }
  }
  return out;
}

namespace {

TimeMs message_time(const ingest::IngestMessage& m) {
  return std::visit([](const auto& v) { return v.t_ms; }, m);
}

}  // namespace

TimeMs drive_trial(Session& session, std::span<const ingest::IngestMessage> events, TimeMs t_end_ms,
                   const std::function<TimeMs(const Evaluation&)>& on_trigger) {
  const auto handle = session.open_trial();
  if (!handle) throw Error(Errc::NoOpenTrial, "drive_trial needs an open trial");
  const bool evaluating = session.condition().has_value();
  const TimeMs period = session.config().eval_period_ms;
  TimeMs next_tick = handle->t_start_ms + period;
  bool triggered = false;
  TimeMs pause = 0;
  std::optional<SignalSample> last_eda;

  auto run_ticks_before = [&](TimeMs limit) {
    while (evaluating && !triggered && next_tick < limit) {
      const auto ev = session.evaluate(next_tick);
      if (ev.first_trigger) {
        triggered = true;
        if (on_trigger) pause = std::max<TimeMs>(0, on_trigger(ev));
        return;
      }
      next_tick += period;
    }
  };

  std::size_t i = 0;
  for (; i < events.size(); ++i) {
    run_ticks_before(message_time(events[i]));
    if (pause > 0) break;
    if (const auto* s = std::get_if<SignalSample>(&events[i])) last_eda = *s;
    session.push(events[i]);
  }
  if (i == events.size()) run_ticks_before(t_end_ms);
  if (pause == 0) return 0;

  // The offer suspends the task: the rest of the trace resumes after the
  // pause while EDA holds its last level.
  pause = (pause + kEdaPeriodMs - 1) / kEdaPeriodMs * kEdaPeriodMs;
  std::vector<ingest::IngestMessage> rest;
  if (last_eda) {
    for (TimeMs t = last_eda->t_ms + kEdaPeriodMs; t < last_eda->t_ms + kEdaPeriodMs + pause;
         t += kEdaPeriodMs) {
      rest.emplace_back(SignalSample{t, last_eda->value, kNoTrial, kNoTrial});
    }
  }
  for (; i < events.size(); ++i) {
    rest.push_back(events[i]);
    std::visit([&](auto& v) { v.t_ms += pause; }, rest.back());
  }
  std::stable_sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) {
    const TimeMs ta = message_time(a);
    const TimeMs tb = message_time(b);
    if (ta != tb) return ta < tb;
    return a.index() < b.index();
  });
  for (const auto& msg : rest) session.push(msg);
  return pause;
}

model::ModelPair calibrate_models(const SessionConfig& cfg,
                                  std::span<const TrialRecord> calibration_records) {
  std::vector<model::CalibrationSample> samples;
  for (const auto& r : calibration_records) {
    if (r.outcome.reported_load) samples.push_back({r.features, *r.outcome.reported_load});
  }
  const auto opts = calibration_options(cfg);
  return {model::calibrate(cfg.initial_models.eda, samples, opts),
          model::calibrate(cfg.initial_models.mouse, samples, opts)};
}

std::string question_concept(const TrialSpec& spec) {
  return std::string(kConcepts[static_cast<std::size_t>(spec.global_index) % kConcepts.size()]);
}

std::string question_text(const TrialSpec& spec) {
  return "Question " + std::to_string(spec.global_index + 1) +
         ": Which statement best describes " + question_concept(spec) + "?";
}

BlockMetrics block_metrics(std::span<const TrialRecord> records) {
  BlockMetrics m;
  m.confusion = eval::confusion(records);
  if (m.confusion.total() > 0) m.detection_accuracy = eval::detection_accuracy(m.confusion);
  if (m.confusion.wanted() > 0) m.false_negative_rate = eval::false_negative_rate(m.confusion);
  for (const auto& r : records) {
    m.offers += r.outcome.help_offered ? 1 : 0;
    m.accepts += r.outcome.help_accepted ? 1 : 0;
  }
  if (m.offers > 0) m.acceptance_rate = eval::acceptance_rate(records);
  if (!records.empty()) m.accuracy = eval::block_accuracy(records);
  return m;
}

std::vector<TrialRecord> SessionReport::all_records() const {
  std::vector<TrialRecord> out;
  for (const auto& b : blocks) out.insert(out.end(), b.records.begin(), b.records.end());
  return out;
}

SessionReport run_session(const SessionConfig& config, const RespondentProfile& profile,
                          std::span<const BlockPlan> plan, const SimOptions& options) {
  validate(config);
  validate(profile);
  validate(plan);

  Rng rng(profile.rng_seed);
  assist::MockClient mock;
  assist::ExplanationClient& client = options.client ? *options.client : mock;

  Session session(config, options.persist_dir.has_value());
  std::optional<ingest::FileStorage> storage;
  std::optional<ingest::BackupWriter> writer;
  if (options.persist_dir) {
    storage.emplace();
    writer.emplace(*options.persist_dir, *storage);
  }
  ingest::BackupScheduler scheduler(config.backup_period_ms);

  SessionReport report;
  report.session_id = config.session_id;
  report.config_seed = config.rng_seed;
  report.profile_seed = profile.rng_seed;
  report.calibrated_models = config.initial_models;

  const double tonic_level = uniform(rng, 3.0, 7.0);
  std::normal_distribution<double> rest_noise(0.0, 0.01);
  TimeMs clock = 0;

  auto maybe_backup = [&](TimeMs now) {
    if (writer && scheduler.due(now)) report.backups.push_back(flush_backup(session, *writer));
  };

  for (std::size_t b = 0; b < plan.size(); ++b) {
    const BlockPlan& block = plan[b];
    const bool calibration = !block.condition.has_value();
    session.start_block(static_cast<int>(b), block.condition,
                        calibration ? config.initial_models : report.calibrated_models);
    BlockReport br;
    br.block = static_cast<int>(b);
    br.condition = block.condition;

    for (int i = 0; i < block.n_trials; ++i) {
      TrialSpec spec;
      spec.trial_index = i;
      spec.difficulty = block.difficulty_sequence[static_cast<std::size_t>(i)];
      spec.correct_option = std::uniform_int_distribution<int>(0, kOptionsPerQuestion - 1)(rng);

      const TrialTrace trace = synth_trial_trace(profile, spec, rng, {clock, tonic_level});
      const TimeMs t_end = clock + trace.duration_ms;
      const auto handle = session.begin_trial(spec, clock);
      spec.global_index = handle.global_index;

      const bool need = trace.latent_load > profile.need_threshold;
      assist::Intervention intervention(question_text(spec), clock);
      const auto events = merge_streams(trace);
      const TimeMs pause = drive_trial(session, events, t_end, [&](const Evaluation& ev) {
        intervention.offer(ev.t_ms);
        const bool accept =
            bernoulli(rng, need ? profile.p_accept_given_need : profile.p_accept_given_no_need);
        const TimeMs t_response = ev.t_ms + uniform_ms(rng, 500, 2500);
        if (!accept) {
          intervention.respond(assist::Response::Decline, t_response);
          return t_response - ev.t_ms;
        }
        intervention.respond(assist::Response::Accept, t_response);
        const TimeMs t_select = t_response + uniform_ms(rng, 1000, 3000);
        intervention.explain(client, question_concept(spec), t_select);
        return t_select + uniform_ms(rng, 2000, 5000) - ev.t_ms;
      });
      const TimeMs t_done = t_end + pause;
      intervention.finish(t_done);

      const double p_correct = correct_probability(profile, trace.latent_load) +
                               (intervention.delivered() ? profile.help_boost : 0.0);
      TrialOutcome outcome;
      outcome.help_offered = intervention.help_offered();
      outcome.help_accepted = intervention.help_accepted();
      outcome.answer_correct = bernoulli(rng, p_correct);
      outcome.self_reported_need = need;
      if (outcome.answer_correct) {
        outcome.chosen_option = spec.correct_option;
      } else {
        const int k = std::uniform_int_distribution<int>(1, kOptionsPerQuestion - 1)(rng);
        outcome.chosen_option = (spec.correct_option + k) % kOptionsPerQuestion;
      }
      outcome.duration_ms = t_done - clock;
      if (calibration) outcome.reported_load = self_report(trace.latent_load);

      br.records.push_back(session.end_trial(outcome));
      br.interventions.push_back(
          {handle.global_index, intervention.log(), intervention.timed_out()});
      clock = t_done;
      maybe_backup(clock);

      // Out-of-trial EDA between questions.
      const TimeMs gap_end = clock + options.inter_trial_gap_ms;
      for (TimeMs t = clock; t < gap_end; t += kEdaPeriodMs) {
        session.push_eda({t, tonic_level + rest_noise(rng), kNoTrial, kNoTrial});
      }
      clock = gap_end;
      maybe_backup(clock);
    }

    br.theta_history = session.threshold().history;
    br.metrics = block_metrics(br.records);
    if (calibration) report.calibrated_models = calibrate_models(config, br.records);
    report.blocks.push_back(std::move(br));
  }

  if (writer) report.backups.push_back(flush_backup(session, *writer));
  return report;
}

SessionConfig session_config_for(const SessionConfig& base, int ordinal) {
  SessionConfig c = base;
  c.session_id = base.session_id + "-" + std::to_string(ordinal);
  c.rng_seed = base.rng_seed + static_cast<std::uint64_t>(ordinal);
  return c;
}

SessionConfig config_for_session(const SessionConfig& base, const std::string& id) {
  const std::string prefix = base.session_id + "-";
  if (id.size() <= prefix.size() || id.compare(0, prefix.size(), prefix) != 0) return base;
  const std::string tail = id.substr(prefix.size());
  if (tail.size() > 9 || !std::all_of(tail.begin(), tail.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return base;
  }
  return session_config_for(base, std::stoi(tail));
}

RespondentProfile profile_for(const RespondentProfile& base, int ordinal) {
  RespondentProfile p = base;
  p.rng_seed = base.rng_seed + static_cast<std::uint64_t>(ordinal);
  return p;
}

std::vector<SessionReport> run_batch(const SessionConfig& base, const RespondentProfile& profile,
                                     int n_sessions, int jobs,
                                     std::optional<std::filesystem::path> persist_dir) {
  if (n_sessions < 1) throw Error(Errc::InvalidArgument, "a batch needs at least one session");
  std::vector<SessionReport> reports(static_cast<std::size_t>(n_sessions));
  std::vector<std::exception_ptr> errors(reports.size());
  auto run_one = [&](int k) {
    try {
      const auto cfg = session_config_for(base, k);
      const auto prof = profile_for(profile, k);
      Rng plan_rng(prof.rng_seed ^ 0x9e3779b97f4a7c15ULL);
      const auto plan = default_plan(plan_rng);
      SimOptions opts;
      opts.persist_dir = persist_dir;
      reports[static_cast<std::size_t>(k)] = run_session(cfg, prof, plan, opts);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  };
  const int workers_n = std::clamp(jobs, 1, n_sessions);
  std::vector<std::thread> workers;
  for (int w = 0; w < workers_n; ++w) {
    workers.emplace_back([&, w] {
      for (int k = w; k < n_sessions; k += workers_n) run_one(k);
    });
  }
  for (auto& t : workers) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return reports;
}

const StrategySummary& SimulationSummary::of(Strategy s) const {
  for (const auto& st : strategies) {
    if (st.condition == to_string(s)) return st;
  }
  throw Error(Errc::InvalidArgument, "strategy missing from summary");
}

SimulationSummary summarize(std::span<const SessionReport> reports) {
  SimulationSummary out;
  out.sessions = static_cast<int>(reports.size());
  double baseline_sum = 0.0;
  int baseline_n = 0;
  for (Strategy s : {Strategy::Aligned, Strategy::Misaligned, Strategy::Random}) {
    StrategySummary st;
    st.condition = std::string(to_string(s));
    double fnr_sum = 0.0;
    double acc_rate_sum = 0.0;
    double accuracy_sum = 0.0;
    double offers_sum = 0.0;
    for (const auto& rep : reports) {
      for (const auto& b : rep.blocks) {
        if (b.condition != s) continue;
        ++st.sessions;
        accuracy_sum += b.metrics.accuracy;
        offers_sum += b.metrics.offers;
        if (b.metrics.false_negative_rate) {
          fnr_sum += *b.metrics.false_negative_rate;
          ++st.fnr_sessions;
        }
        if (b.metrics.acceptance_rate) {
          acc_rate_sum += *b.metrics.acceptance_rate;
          ++st.acceptance_sessions;
        }
        st.pooled.shown_wanted += b.metrics.confusion.shown_wanted;
        st.pooled.shown_not_wanted += b.metrics.confusion.shown_not_wanted;
        st.pooled.not_shown_wanted += b.metrics.confusion.not_shown_wanted;
        st.pooled.not_shown_not_wanted += b.metrics.confusion.not_shown_not_wanted;
      }
    }
    if (st.sessions > 0) {
      st.mean_accuracy = accuracy_sum / st.sessions;
      st.mean_offers = offers_sum / st.sessions;
    }
    if (st.fnr_sessions > 0) st.mean_fnr = fnr_sum / st.fnr_sessions;
    if (st.acceptance_sessions > 0) st.mean_acceptance = acc_rate_sum / st.acceptance_sessions;
    out.strategies.push_back(st);
  }
  for (const auto& rep : reports) {
    for (const auto& b : rep.blocks) {
      if (b.condition) continue;
      baseline_sum += b.metrics.accuracy;
      ++baseline_n;
    }
  }
  if (baseline_n > 0) out.baseline_accuracy = baseline_sum / baseline_n;
  return out;
}

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json to_json(const eval::ConfusionCounts& c) {
  return Json{{"shown_wanted", c.shown_wanted},
              {"shown_not_wanted", c.shown_not_wanted},
              {"not_shown_wanted", c.not_shown_wanted},
              {"not_shown_not_wanted", c.not_shown_not_wanted}};
}

Json to_json(const BlockMetrics& m) {
  return Json{{"confusion", to_json(m.confusion)},
              {"detection_accuracy", optional_number(m.detection_accuracy)},
              {"false_negative_rate", optional_number(m.false_negative_rate)},
              {"acceptance_rate", optional_number(m.acceptance_rate)},
              {"accuracy", m.accuracy},
              {"offers", m.offers},
              {"accepts", m.accepts}};
}

}  // namespace

std::string to_json_string(const SessionReport& report) {
  Json blocks = Json::array();
  for (const auto& b : report.blocks) {
    Json records = Json::array();
    for (const auto& r : b.records) records.push_back(overload::to_json(r));
    Json interventions = Json::array();
    for (const auto& iv : b.interventions) {
      Json transitions = Json::array();
      for (const auto& t : iv.transitions) {
        transitions.push_back({{"t_ms", t.t_ms}, {"phase", assist::to_string(t.phase)}});
      }
      interventions.push_back({{"global_index", iv.global_index},
                               {"transitions", transitions},
                               {"client_timed_out", iv.client_timed_out}});
    }
    Json history = Json::array();
    for (const auto& h : b.theta_history) {
      history.push_back({{"global_index", h.global_index},
                         {"theta_before", h.theta_before},
                         {"delta", h.delta_applied},
                         {"theta_after", h.theta_after}});
    }
    blocks.push_back({{"block", b.block},
                      {"condition", condition_name(b.condition)},
                      {"metrics", to_json(b.metrics)},
                      {"theta_history", history},
                      {"interventions", interventions},
                      {"records", records}});
  }
  Json j{{"session_id", report.session_id},
         {"config_seed", report.config_seed},
         {"profile_seed", report.profile_seed},
         {"calibrated_models", overload::to_json(report.calibrated_models)},
         {"blocks", blocks}};
  return j.dump(2);
}

std::string to_json_string(const SimulationSummary& summary) {
  Json strategies = Json::array();
  for (const auto& s : summary.strategies) {
    strategies.push_back({{"condition", s.condition},
                          {"sessions", s.sessions},
                          {"mean_fnr", optional_number(s.mean_fnr)},
                          {"fnr_sessions", s.fnr_sessions},
                          {"mean_acceptance_rate", optional_number(s.mean_acceptance)},
                          {"acceptance_sessions", s.acceptance_sessions},
                          {"mean_accuracy", s.mean_accuracy},
                          {"mean_offers", s.mean_offers},
                          {"pooled_confusion", to_json(s.pooled)}});
  }
  return Json{{"sessions", summary.sessions},
              {"baseline_accuracy", summary.baseline_accuracy},
              {"strategies", strategies}}
      .dump(2);
}

}  // namespace overload::sim
