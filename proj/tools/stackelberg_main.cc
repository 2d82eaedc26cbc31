// Copyright 2026 The Stackelberg Assembly Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver: train, evaluate, perturb, solve, generate and compare.
//
// Exit codes: 0 success, 1 usage error, 2 invalid input, 3 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stackelberg/environment.h"
#include "stackelberg/eval_harness.h"
#include "stackelberg/learning.h"
#include "stackelberg/task_model.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace stackelberg {
namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitRuntime = 3;
constexpr const char* kOutputRootEnv = "STACKELBERG_OUTPUT_ROOT";

// Input problems found before any work starts.
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

fs::path output_root() {
  const char* root = std::getenv(kOutputRootEnv);
  return root && *root ? fs::path(root) : fs::path("runs");
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput(path.string() + " is not valid JSON: " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

// Shared training and environment flags. Flags given on the command line
// override values from a config file.
struct ConfigFlags {
  std::string config_file;
  std::string algorithm = "sg";
  std::uint64_t seed = 0;
  int episodes = 0;
  int max_steps = 0;
  double gamma = 0.0;
  double learning_rate = 0.0;
  int batch_size = 0;
  int buffer_capacity = 0;
  double tau = -1.0;
  int target_period = 0;
  std::vector<int> hidden;
  double p_individual = -1.0;
  double p_cooperative = -1.0;
  bool deterministic = false;

  void add_to(CLI::App* app, bool with_algorithm) {
    app->add_option("--config", config_file, "JSON config (keys: task, algorithm, train, env)");
    if (with_algorithm) {
      app->add_option("--algo", algorithm, "sg, nash or ind")
          ->check(CLI::IsMember({"sg", "nash", "ind", "stackelberg", "independent"}));
    }
    app->add_option("--seed", seed, "random seed");
    app->add_option("--episodes", episodes, "training episodes")->check(CLI::PositiveNumber);
    app->add_option("--max-steps", max_steps, "episode step budget")->check(CLI::PositiveNumber);
    app->add_option("--gamma", gamma, "discount factor");
    app->add_option("--lr", learning_rate, "Adam learning rate");
    app->add_option("--batch-size", batch_size, "replay batch size");
    app->add_option("--buffer", buffer_capacity, "replay capacity");
    app->add_option("--tau", tau, "soft update coefficient");
    app->add_option("--target-period", target_period, "soft update period in steps");
    app->add_option("--hidden", hidden, "hidden layer widths")->delimiter(',');
    app->add_option("--p-ind", p_individual, "individual success probability");
    app->add_option("--p-coop", p_cooperative, "joint success probability");
    app->add_flag("--deterministic", deterministic, "all attempts succeed");
  }
};

struct ResolvedConfig {
  std::string task_path;
  Algorithm algorithm = Algorithm::kStackelberg;
  TrainConfig train;
  EnvConfig env;
  bool env_max_steps_set = false;
  int checkpoint_every = 0;
};

// Layers defaults, then the config file, then explicit flags.
ResolvedConfig resolve(const CLI::App& app, const ConfigFlags& f) {
  ResolvedConfig r;
  try {
    if (!f.config_file.empty()) {
      json doc = read_json_file(f.config_file);
      for (const auto& [key, value] : doc.items()) {
        if (key != "task" && key != "algorithm" && key != "train" && key != "env" &&
            key != "checkpoint_every") {
          throw InvalidInput("unknown config key: " + key);
        }
      }
      r.task_path = doc.value("task", std::string());
      if (doc.contains("algorithm")) r.algorithm = parse_algorithm(doc["algorithm"]);
      if (doc.contains("train")) r.train = train_config_from_json(doc["train"]);
      if (doc.contains("env")) {
        r.env = env_config_from_json(doc["env"]);
        r.env_max_steps_set = doc["env"].contains("max_steps");
      }
      r.checkpoint_every = doc.value("checkpoint_every", 0);
    }
    if (const auto* o = app.get_option_no_throw("--algo"); o && o->count())
      r.algorithm = parse_algorithm(f.algorithm);
    if (app.count("--seed")) r.train.seed = f.seed;
    if (app.count("--episodes")) r.train.episodes = f.episodes;
    if (app.count("--max-steps")) {
      r.env.max_steps = f.max_steps;
      r.env_max_steps_set = true;
    }
    if (app.count("--gamma")) r.train.gamma = f.gamma;
    if (app.count("--lr")) r.train.learning_rate = f.learning_rate;
    if (app.count("--batch-size")) r.train.batch_size = f.batch_size;
    if (app.count("--buffer")) r.train.buffer_capacity = f.buffer_capacity;
    if (app.count("--tau")) r.train.tau = f.tau;
    if (app.count("--target-period")) r.train.target_period = f.target_period;
    if (app.count("--hidden")) r.train.hidden_sizes = f.hidden;
    if (app.count("--p-ind")) r.env.p_individual = f.p_individual;
    if (app.count("--p-coop")) r.env.p_cooperative = f.p_cooperative;
    if (f.deterministic) r.env.deterministic = true;
    r.train.validate();
    r.env.validate();
  } catch (const std::invalid_argument& e) {
    throw InvalidInput(e.what());
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad config value: ") + e.what());
  }
  return r;
}

AssemblyTask load_task_or_fail(const std::string& path) {
  if (path.empty()) throw InvalidInput("no task file given");
  return load_task(path);  // TaskParseError / TaskValidationError map to exit 2
}

// The step budget comes from the task unless set explicitly.
void apply_task_budget(ResolvedConfig& r, const AssemblyTask& task) {
  if (!r.env_max_steps_set) r.env.max_steps = default_max_steps(task);
}

json run_config_json(const ResolvedConfig& r) {
  return {{"task", r.task_path},
          {"algorithm", algorithm_name(r.algorithm)},
          {"checkpoint_every", r.checkpoint_every},
          {"train", to_json(r.train)},
          {"env", to_json(r.env)}};
}

// ---- train --------------------------------------------------------------

int cmd_train(const CLI::App& app, const ConfigFlags& flags, const std::string& task_arg,
              const std::string& out_arg, int checkpoint_every, bool quiet) {
  ResolvedConfig r = resolve(app, flags);
  if (!task_arg.empty()) r.task_path = task_arg;
  if (app.count("--checkpoint-every")) r.checkpoint_every = checkpoint_every;
  AssemblyTask task = load_task_or_fail(r.task_path);
  r.task_path = fs::absolute(r.task_path).lexically_normal().string();
  apply_task_budget(r, task);

  fs::path run_dir = out_arg.empty()
                         ? output_root() / (task.name() + "_" + algorithm_name(r.algorithm) +
                                            "_seed" + std::to_string(r.train.seed))
                         : fs::path(out_arg);
  fs::create_directories(run_dir / "checkpoints");
  write_json_file(run_dir / "config.json", run_config_json(r));

  std::ofstream metrics(run_dir / "metrics.jsonl");
  std::ofstream timing(run_dir / "timing.jsonl");
  const int report_every = std::max(1, r.train.episodes / 20);
  Trainer trainer(task, r.env, r.train, r.algorithm);
  double window_steps = 0.0;
  while (!trainer.finished()) {
    EpisodeMetrics m = trainer.run_episode();
    metrics << to_json(m).dump() << "\n";
    timing << json{{"episode", m.episode}, {"wall_seconds", m.wall_seconds}}.dump() << "\n";
    window_steps += m.steps;
    if (r.checkpoint_every > 0 && m.episode % r.checkpoint_every == 0) {
      save_checkpoint(trainer.checkpoint(),
                      run_dir / "checkpoints" / ("episode_" + std::to_string(m.episode) + ".json"));
    }
    if (!quiet && m.episode % report_every == 0) {
      std::cout << "episode " << m.episode << "/" << r.train.episodes << "  epsilon "
                << std::fixed << std::setprecision(3) << m.epsilon << "  mean steps "
                << std::setprecision(2) << window_steps / report_every << std::endl;
      window_steps = 0.0;
    }
  }
  save_checkpoint(trainer.checkpoint(), run_dir / "checkpoints" / "final.json");
  std::cout << "run directory: " << run_dir.string() << "\n";
  return 0;
}

// ---- eval / perturb -------------------------------------------------------

struct LoadedRun {
  json config;
  AssemblyTask task;
  Checkpoint checkpoint;
  EnvConfig env;
};

LoadedRun load_run(const fs::path& run_dir, const std::string& task_arg,
                   const std::string& checkpoint_arg) {
  if (!fs::is_directory(run_dir)) throw InvalidInput("run directory not found: " + run_dir.string());
  json config = read_json_file(run_dir / "config.json");
  std::string task_path = task_arg.empty() ? config.value("task", std::string()) : task_arg;
  AssemblyTask task = load_task_or_fail(task_path);
  fs::path ck = checkpoint_arg.empty() ? run_dir / "checkpoints" / "final.json"
                                       : fs::path(checkpoint_arg);
  if (!fs::exists(ck)) throw InvalidInput("checkpoint not found: " + ck.string());
  EnvConfig env;
  try {
    env = env_config_from_json(config.value("env", json::object()));
  } catch (const std::invalid_argument& e) {
    throw InvalidInput(e.what());
  }
  return {config, task, load_checkpoint(ck), env};
}

void print_episode_table(std::ostream& out, const std::vector<EpisodeRecord>& episodes) {
  out << "run  steps  completed  reward_l  reward_f\n";
  for (size_t i = 0; i < episodes.size(); ++i) {
    const EpisodeRecord& e = episodes[i];
    out << std::setw(3) << i + 1 << "  " << std::setw(5) << e.completion_steps << "  "
        << std::setw(9) << (e.completed ? "yes" : "no") << "  " << std::setw(8) << std::fixed
        << std::setprecision(3) << e.averaged_leader() << "  " << std::setw(8)
        << e.averaged_follower() << "\n";
  }
}

int cmd_eval(const std::string& run_dir, const std::string& task_arg,
             const std::string& checkpoint_arg, int episodes, std::uint64_t seed,
             bool deterministic) {
  LoadedRun run = load_run(run_dir, task_arg, checkpoint_arg);
  if (deterministic) run.env.deterministic = true;
  Rng rng(seed);
  EvalMetrics m = evaluate(run.checkpoint.leader_online, run.checkpoint.follower_online,
                           run.task, run.env, episodes, rng, run.checkpoint.algorithm);
  const std::string stem = deterministic ? "eval_deterministic" : "eval";
  std::ofstream log(fs::path(run_dir) / (stem + "_episodes.jsonl"));
  for (const EpisodeRecord& e : m.episodes) write_episode_log(log, e);
  json summary = {{"episodes", m.n_episodes},
                  {"seed", seed},
                  {"deterministic", run.env.deterministic},
                  {"completion_rate", m.completion_rate},
                  {"mean_steps", m.mean_steps},
                  {"std_steps", m.std_steps},
                  {"mean_averaged_leader", m.mean_averaged_leader},
                  {"std_averaged_leader", m.std_averaged_leader},
                  {"mean_averaged_follower", m.mean_averaged_follower},
                  {"std_averaged_follower", m.std_averaged_follower}};
  write_json_file(fs::path(run_dir) / (stem + ".json"), summary);
  print_episode_table(std::cout, m.episodes);
  std::cout << std::setprecision(3) << "completion rate " << m.completion_rate << "\n"
            << "steps " << m.mean_steps << " (" << m.std_steps << ")\n"
            << "reward leader " << m.mean_averaged_leader << " (" << m.std_averaged_leader
            << ")  follower " << m.mean_averaged_follower << " (" << m.std_averaged_follower
            << ")\n";
  return 0;
}

int cmd_perturb(const std::string& run_dir, const std::string& task_arg,
                const std::string& checkpoint_arg, const std::string& schedule_text, int runs,
                std::uint64_t seed) {
  PerturbationSchedule schedule;
  try {
    schedule = PerturbationSchedule::parse(schedule_text);
  } catch (const std::invalid_argument& e) {
    throw InvalidInput(e.what());
  }
  LoadedRun run = load_run(run_dir, task_arg, checkpoint_arg);
  PerturbedMetrics m =
      run_perturbed_eval(run.checkpoint.leader_online, run.checkpoint.follower_online, run.task,
                         schedule, runs, run.env, seed, run.checkpoint.algorithm);
  std::ofstream log(fs::path(run_dir) / "perturb_episodes.jsonl");
  json trajectories = json::array();
  std::vector<EpisodeRecord> episodes;
  for (const PerturbedRun& r : m.runs) {
    write_episode_log(log, r.episode);
    trajectories.push_back({{"cumulative_leader", r.cumulative_leader},
                            {"cumulative_follower", r.cumulative_follower}});
    episodes.push_back(r.episode);
  }
  write_json_file(fs::path(run_dir) / "perturb.json",
                  {{"schedule", schedule.to_string()},
                   {"runs", m.n_runs},
                   {"seed", seed},
                   {"completion_rate", m.completion_rate},
                   {"mean_steps", m.mean_steps},
                   {"std_steps", m.std_steps},
                   {"trajectories", trajectories}});
  std::cout << "schedule " << (schedule.entries.empty() ? "(none)" : schedule.to_string())
            << "\n";
  print_episode_table(std::cout, episodes);
  std::cout << std::setprecision(3) << "completion rate " << m.completion_rate << "\n"
            << "steps " << m.mean_steps << " (" << m.std_steps << ")\n";
  return 0;
}

// ---- oracle / gen / validate --------------------------------------------

int cmd_oracle(const std::string& task_path, long max_states) {
  AssemblyTask task = load_task_or_fail(task_path);
  OracleResult r = optimal_steps_oracle(task, max_states);
  std::cout << "S* = " << r.steps << "  (" << r.states_expanded << " states expanded)\n";
  auto describe = [](Action column, SubTaskId id) {
    return column == kNoOp ? std::string("idle")
                           : "column " + std::to_string(column) + " (T" + std::to_string(id) + ")";
  };
  for (size_t i = 0; i < r.witness.size(); ++i) {
    const ScheduledRound& round = r.witness[i];
    std::cout << "round " << std::setw(2) << i + 1 << ": L "
              << describe(round.action.leader, round.leader_subtask) << ", F "
              << describe(round.action.follower, round.follower_subtask) << "\n";
  }
  return 0;
}

int cmd_gen(TaskGenSpec spec, const std::vector<double>& weights, const std::string& out) {
  if (!weights.empty()) {
    if (weights.size() != 4) throw InvalidInput("--weights needs four values");
    std::copy(weights.begin(), weights.end(), spec.type_weights.begin());
  }
  AssemblyTask task = [&] {
    try {
      return generate_task(spec);
    } catch (const InfeasibleSpec& e) {
      throw InvalidInput(e.what());
    }
  }();
  if (out.empty()) {
    std::cout << task_to_json(task).dump(2) << "\n";
  } else {
    if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
    save_task(task, out);
    std::cout << "wrote " << out << " (" << task.n_subtasks() << " sub-tasks, "
              << task.n_columns() << " columns)\n";
  }
  return 0;
}

int cmd_validate(const std::string& task_path) {
  AssemblyTask task = load_task_or_fail(task_path);
  std::cout << "valid: " << task.name() << ", " << task.n_subtasks() << " sub-tasks, "
            << task.n_columns() << " columns, " << task.edges().size() << " edges, step budget "
            << default_max_steps(task) << "\n";
  return 0;
}

// ---- suite ----------------------------------------------------------------

int cmd_suite(const CLI::App& app, const ConfigFlags& flags, const std::vector<std::string>& tasks,
              const std::vector<int>& surrogate_sizes, std::uint64_t surrogate_seed,
              const std::vector<std::string>& algos, const std::vector<std::uint64_t>& seeds,
              int eval_episodes, int threads, const std::string& out_arg) {
  ResolvedConfig r = resolve(app, flags);
  SuiteConfig suite;
  suite.train = r.train;
  suite.env = r.env;
  if (r.env_max_steps_set) suite.train.max_steps = r.env.max_steps;
  suite.eval_episodes = eval_episodes;
  suite.threads = threads;
  suite.seeds = seeds;
  suite.algorithms.clear();
  try {
    for (const std::string& a : algos) suite.algorithms.push_back(parse_algorithm(a));
  } catch (const std::invalid_argument& e) {
    throw InvalidInput(e.what());
  }
  suite.output_dir = out_arg.empty() ? output_root() / "suite" : fs::path(out_arg);
  fs::create_directories(suite.output_dir / "tasks");
  for (const std::string& path : tasks) {
    AssemblyTask t = load_task_or_fail(path);
    suite.tasks.push_back({t.name(), t});
  }
  for (int size : surrogate_sizes) {
    TaskGenSpec spec;
    spec.name = "surrogate" + std::to_string(size);
    spec.n_subtasks = size;
    spec.seed = surrogate_seed;
    AssemblyTask t = generate_task(spec);
    save_task(t, suite.output_dir / "tasks" / spec.name);
    suite.tasks.push_back({spec.name, t});
  }
  json snapshot = run_config_json(r);
  snapshot.erase("task");
  snapshot["tasks"] = tasks;
  snapshot["surrogate_sizes"] = surrogate_sizes;
  snapshot["surrogate_seed"] = surrogate_seed;
  snapshot["algorithms"] = algos;
  snapshot["seeds"] = seeds;
  snapshot["eval_episodes"] = eval_episodes;
  write_json_file(suite.output_dir / "config.json", snapshot);

  SuiteResults results = run_experiment_suite(suite);
  std::cout << render_table(results.table);
  std::cout << "results: " << (suite.output_dir / "results.jsonl").string() << "\n";
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Stackelberg double deep Q-learning for two-robot chessboard assembly"};
  app.require_subcommand(1);
  int status = 0;

  // train
  CLI::App* train = app.add_subcommand("train", "train a leader/follower pair on a task");
  ConfigFlags train_flags;
  std::string train_task, train_out;
  int checkpoint_every = 0;
  bool quiet = false;
  train->add_option("task", train_task, "task file");
  train_flags.add_to(train, true);
  train->add_option("-o,--out", train_out, "run directory");
  train->add_option("--checkpoint-every", checkpoint_every, "episodes between checkpoints");
  train->add_flag("-q,--quiet", quiet, "no progress output");
  train->callback([&] {
    status = cmd_train(*train, train_flags, train_task, train_out, checkpoint_every, quiet);
  });

  // eval
  CLI::App* eval = app.add_subcommand("eval", "greedy evaluation of a trained run");
  std::string eval_run, eval_task, eval_ck;
  int eval_episodes = 10;
  std::uint64_t eval_seed = 0;
  bool eval_det = false;
  eval->add_option("run_dir", eval_run, "run directory")->required();
  eval->add_option("task", eval_task, "task file (default: the run's task)");
  eval->add_option("--checkpoint", eval_ck, "checkpoint file (default: final)");
  eval->add_option("--episodes", eval_episodes, "evaluation episodes")->check(CLI::PositiveNumber);
  eval->add_option("--seed", eval_seed, "evaluation seed");
  eval->add_flag("--deterministic", eval_det, "all attempts succeed");
  eval->callback([&] {
    status = cmd_eval(eval_run, eval_task, eval_ck, eval_episodes, eval_seed, eval_det);
  });

  // perturb
  CLI::App* perturb = app.add_subcommand("perturb", "deterministic runs with forced no-ops");
  std::string pert_run, pert_task, pert_ck, pert_schedule;
  int pert_runs = 10;
  std::uint64_t pert_seed = 0;
  perturb->add_option("run_dir", pert_run, "run directory")->required();
  perturb->add_option("task", pert_task, "task file (default: the run's task)");
  perturb->add_option("--checkpoint", pert_ck, "checkpoint file (default: final)");
  perturb->add_option("--schedule", pert_schedule, "1-based rounds, e.g. L:1,L:4,F:6,F:8");
  perturb->add_option("--runs", pert_runs, "number of runs")->check(CLI::PositiveNumber);
  perturb->add_option("--seed", pert_seed, "seed");
  perturb->callback([&] {
    status = cmd_perturb(pert_run, pert_task, pert_ck, pert_schedule, pert_runs, pert_seed);
  });

  // oracle
  CLI::App* oracle = app.add_subcommand("oracle", "minimum rounds with every attempt succeeding");
  std::string oracle_task;
  long max_states = 5'000'000;
  oracle->add_option("task", oracle_task, "task file")->required();
  oracle->add_option("--max-states", max_states, "search budget");
  oracle->callback([&] { status = cmd_oracle(oracle_task, max_states); });

  // gen
  CLI::App* gen = app.add_subcommand("gen", "generate a random chessboard task");
  TaskGenSpec spec;
  std::vector<double> weights;
  std::string gen_out;
  gen->add_option("--columns", spec.n_columns, "board width");
  gen->add_option("--subtasks", spec.n_subtasks, "number of sub-tasks");
  gen->add_option("--rows", spec.rows, "row limit (0: unlimited)");
  gen->add_option("--merge-prob", spec.merge_probability, "chance a joint sub-task spans two columns");
  gen->add_option("--weights", weights, "relative weights of types 1..4")->delimiter(',');
  gen->add_option("--seed", spec.seed, "seed");
  gen->add_option("--name", spec.name, "task name");
  gen->add_option("-o,--out", gen_out, "output file (default: stdout)");
  gen->callback([&] { status = cmd_gen(spec, weights, gen_out); });

  // suite
  CLI::App* suite = app.add_subcommand("suite", "multi-seed comparison across tasks and algorithms");
  ConfigFlags suite_flags;
  std::vector<std::string> suite_tasks;
  std::vector<int> surrogate_sizes;
  std::uint64_t surrogate_seed = 0;
  std::vector<std::string> suite_algos = {"sg", "nash", "ind"};
  std::vector<std::uint64_t> suite_seeds = {0, 1, 2};
  int suite_eval = 10, suite_threads = 1;
  std::string suite_out;
  suite->add_option("--task", suite_tasks, "task file (repeatable)");
  suite->add_option("--surrogates", surrogate_sizes, "generated task sizes, e.g. 18,20,26")
      ->delimiter(',');
  suite->add_option("--surrogate-seed", surrogate_seed, "seed for generated tasks");
  suite->add_option("--algos", suite_algos, "algorithms")->delimiter(',');
  suite->add_option("--seeds", suite_seeds, "training seeds")->delimiter(',');
  suite->add_option("--eval-episodes", suite_eval, "evaluation episodes per cell");
  suite->add_option("--threads", suite_threads, "parallel cells")->check(CLI::PositiveNumber);
  suite->add_option("-o,--out", suite_out, "output directory");
  suite_flags.add_to(suite, false);
  suite->callback([&] {
    status = cmd_suite(*suite, suite_flags, suite_tasks, surrogate_sizes, surrogate_seed,
                       suite_algos, suite_seeds, suite_eval, suite_threads, suite_out);
  });

  // validate
  CLI::App* validate = app.add_subcommand("validate", "check a task file");
  std::string validate_task;
  validate->add_option("task", validate_task, "task file")->required();
  validate->callback([&] { status = cmd_validate(validate_task); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const TaskValidationError& e) {
    std::cerr << "error: invalid task: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const TaskParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return status;
}

}  // namespace
}  // namespace stackelberg

int main(int argc, char** argv) { return stackelberg::run(argc, argv); }
