#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "renewcast/errors.hpp"
#include "renewcast/experiment.hpp"

using namespace renewcast;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.models = {"croston", "sba", "tsb", "zeros", "static-g-po", "static-nb-nb"};
    cfg.holdout = 4;
    cfg.n_paths = 100;
    cfg.repetitions = 2;
    cfg.seed = 7;
    return cfg;
}

std::vector<DemandSeries> small_dataset() {
    GeneratorSpec g;
    g.kind = GeneratorKind::random;
    g.n_series = 12;
    g.n_periods = 60;
    g.seed = 3;
    return generate(g);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("renewcast_exp_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int cli(const std::string& args) {
    const std::string cmd = std::string(RENEWCAST_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, JsonRoundTripAndHash) {
    ExperimentConfig cfg = small_config();
    cfg.generator = GeneratorSpec{};
    const ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
    EXPECT_EQ(back.to_json(), cfg.to_json());
    EXPECT_EQ(config_hash(back), config_hash(cfg));
    EXPECT_EQ(config_hash(cfg).size(), 16u);

    ExperimentConfig moved = cfg;
    moved.output_dir = "elsewhere";
    EXPECT_EQ(config_hash(moved), config_hash(cfg));
    moved.seed = 8;
    EXPECT_NE(config_hash(moved), config_hash(cfg));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    nlohmann::json j = small_config().to_json();
    j["holdot"] = 3;
    EXPECT_THROW(ExperimentConfig::from_json(j), ConfigError);

    ExperimentConfig cfg = small_config();
    cfg.holdout = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.models = {"static-e-po"};
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.metrics = {"mase"};
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.models = {"holt-winters"};
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Experiment, HoldoutMustBeShorterThanEverySeries) {
    ExperimentConfig cfg = small_config();
    cfg.holdout = 60;
    const auto data = small_dataset();
    EXPECT_THROW(run_experiment(cfg, &data), ConfigError);
}

TEST(Experiment, ProducesEveryModelAndRepetition) {
    const auto data = small_dataset();
    const ExperimentResults r = run_experiment(small_config(), &data);
    ASSERT_EQ(r.models.size(), 6u);
    for (const auto& m : r.models) {
        EXPECT_FALSE(m.error) << m.id << ": " << m.error.value_or("");
        EXPECT_EQ(m.reports.size(), 2u);
        EXPECT_TRUE(m.summary.at("rmse").mean);
    }
    EXPECT_EQ(r.model("zeros").summary.at("p90").mean, r.model("zeros").summary.at("p50").mean);
    EXPECT_EQ(r.model("static-nb-nb").name, "Static NB-NB");
    EXPECT_EQ(model_display_name("sba"), "SBA");
    EXPECT_THROW(r.model("nope"), ValidationError);
}

TEST(Experiment, DropsItemsWithoutTrainingDemand) {
    auto data = small_dataset();
    data.push_back({"silent", 0, std::vector<Count>(60, 0)});
    data.back().values[58] = 4;
    const ExperimentResults r = run_experiment(small_config(), &data);
    EXPECT_EQ(r.dropped_items, std::vector<std::string>{"silent"});
    EXPECT_EQ(r.evaluated_items, 12u);
}

TEST(Experiment, ForecastsIgnoreHoldoutValues) {
    auto data = small_dataset();
    auto poisoned = data;
    for (auto& s : poisoned) {
        for (std::size_t t = s.values.size() - 4; t < s.values.size(); ++t) s.values[t] = 999;
    }
    ExperimentConfig cfg = small_config();
    cfg.models.push_back("ewma-g-po");
    const ExperimentResults a = run_experiment(cfg, &data);
    const ExperimentResults b = run_experiment(cfg, &poisoned);
    for (std::size_t m = 0; m < a.models.size(); ++m) {
        for (std::size_t rep = 0; rep < 2; ++rep) {
            for (std::size_t i = 0; i < a.models[m].forecasts[rep].size(); ++i) {
                const auto& fa = a.models[m].forecasts[rep][i];
                const auto& fb = b.models[m].forecasts[rep][i];
                EXPECT_EQ(fa.point, fb.point) << a.models[m].id;
                EXPECT_EQ(fa.quantiles, fb.quantiles) << a.models[m].id;
                EXPECT_NE(fa.actual, fb.actual);
            }
        }
    }
}

TEST(Experiment, ModelFailureDoesNotStopTheRun) {
    const auto data = small_dataset();
    ExperimentConfig cfg = small_config();
    cfg.models = {"croston", "rnn-nb-nb"};
    cfg.rnn_hidden = 3;
    cfg.train.learning_rate = 1e300;
    cfg.train.weight_decay = 0.0;
    cfg.train.epochs = 5;
    const ExperimentResults r = run_experiment(cfg, &data);
    EXPECT_FALSE(r.model("croston").error);
    ASSERT_TRUE(r.model("rnn-nb-nb").error);
    EXPECT_NE(r.model("rnn-nb-nb").error->find("epoch"), std::string::npos);
    const auto j = results_to_json(r);
    EXPECT_EQ(j["models"][1]["status"], "error");
}

TEST(Experiment, SerialAndParallelIdentical) {
    const auto data = small_dataset();
    ExperimentConfig cfg = small_config();
    cfg.models = {"static-nb-nb", "rnn-g-po"};
    cfg.rnn_hidden = 3;
    cfg.train.epochs = 10;
    const auto a = results_to_json(run_experiment(cfg, &data, Execution::serial));
    const auto b = results_to_json(run_experiment(cfg, &data, Execution::parallel));
    EXPECT_EQ(a.dump(), b.dump());
}

TEST(Experiment, GeneratorRegeneratedPerRepetition) {
    ExperimentConfig cfg = small_config();
    cfg.models = {"croston"};
    GeneratorSpec g;
    g.kind = GeneratorKind::random;
    g.n_series = 10;
    g.n_periods = 50;
    cfg.generator = g;
    const ExperimentResults r = run_experiment(cfg);
    const auto& v = r.model("croston").summary.at("rmse").values;
    ASSERT_EQ(v.size(), 2u);
    EXPECT_NE(*v[0], *v[1]);
    EXPECT_GT(*r.model("croston").summary.at("rmse").std, 0.0);
}

TEST(Experiment, WritesResultsAndQuantiles) {
    const auto dir = scratch("write");
    const auto data = small_dataset();
    ExperimentConfig cfg = small_config();
    cfg.models = {"tsb", "static-g-po"};
    cfg.output_dir = dir.string();
    const ExperimentResults r = run_experiment(cfg, &data);
    write_results(r);
    const auto doc = nlohmann::json::parse(slurp(dir / "results.json"));
    EXPECT_EQ(doc["config_hash"], r.config_hash);
    std::istringstream q(slurp(dir / "quantiles.csv"));
    std::string header;
    std::getline(q, header);
    EXPECT_EQ(header, "model_id,repetition,item_id,horizon_step,actual,point,q0.1,q0.5,q0.9");
    std::size_t rows = 0;
    for (std::string line; std::getline(q, line);) ++rows;
    EXPECT_EQ(rows, 2u * 2u * 12u * 4u);
    EXPECT_NE(format_results_table(r).find("Static G-Po"), std::string::npos);
}

TEST(Cli, RunIsByteDeterministic) {
    const auto dir = scratch("cli");
    const auto data = (dir / "data.csv").string();
    ASSERT_EQ(cli("generate --kind random --n-series 8 --n-periods 50 --seed 2 -o " + data), 0);
    ASSERT_TRUE(fs::exists(data));
    const std::string run = " run -d " + data + " --models croston,static-nb-nb,rnn-g-po --hidden 3 --epochs 5" +
                            " --repetitions 2 -S 50 -q -L 4 -o " + (dir / "out").string();
    ASSERT_EQ(cli(run), 0);
    const std::string first_json = slurp(dir / "out" / "results.json");
    const std::string first_csv = slurp(dir / "out" / "quantiles.csv");
    ASSERT_FALSE(first_json.empty());
    ASSERT_EQ(cli(run), 0);
    EXPECT_EQ(slurp(dir / "out" / "results.json"), first_json);
    EXPECT_EQ(slurp(dir / "out" / "quantiles.csv"), first_csv);
}

TEST(Cli, FitForecastEvaluate) {
    const auto dir = scratch("pipeline");
    const auto data = (dir / "data.csv").string();
    ASSERT_EQ(cli("generate --kind periodic --n-series 5 --n-periods 100 -o " + data), 0);
    const auto model = (dir / "m.json").string();
    ASSERT_EQ(cli("fit -d " + data + " -m static-nb-nb -o " + model), 0);
    const auto fc = (dir / "fc.csv").string();
    ASSERT_EQ(cli("forecast --model " + model + " -d " + data + " -L 6 -S 40 -o " + fc), 0);
    EXPECT_EQ(cli("evaluate -d " + data + " -f " + fc), 0);
    EXPECT_EQ(cli("summarize -d " + data + " --json"), 0);
    EXPECT_EQ(cli("sbc -d " + data), 0);
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch("codes");
    const auto bad = (dir / "bad.csv").string();
    { std::ofstream(bad) << "item_id,period_index,demand\na,0,-1\n"; }
    EXPECT_EQ(cli("summarize -d " + bad), 1);
    EXPECT_EQ(cli("summarize"), 1);
    EXPECT_EQ(cli("--help"), 0);
    EXPECT_EQ(cli("summarize -d " + bad + " --format diagonal"), 1);
    const auto good = (dir / "good.csv").string();
    { std::ofstream(good) << "a,0,1\na,1,0\na,2,3\na,3,0\na,4,0\n"; }
    EXPECT_EQ(cli("run -d " + good + " -L 2 --models rnn-nb-nb --epochs 5 --lr 1e300 -q -o " + (dir / "o").string()), 0);
    EXPECT_EQ(cli("fit -d " + good + " -m rnn-nb-nb --epochs 5 --lr 1e300 --weight-decay 0 -o " + (dir / "m.json").string()), 2);
}
