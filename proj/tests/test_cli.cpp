#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const char* cli_path() { return MAGSEQ_CLI_PATH; }

struct TempDir {
    fs::path path;

    TempDir() {
        path = fs::temp_directory_path() /
               ("magseq_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int counter() {
        static int n = 0;
        return n++;
    }
};

int run(const std::string& args) {
    const std::string cmd = std::string(cli_path()) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string write_tiny_config(const fs::path& dir, double eta = 0.01) {
    const fs::path cfg = dir / "config.json";
    std::ofstream os(cfg);
    os << R"({
  "physics": {"n_steps": 21},
  "train": {"hidden_size": 4, "batch_size": 8, "epochs": 2, "eta": )"
       << eta << R"(, "seed": 11}
})";
    return cfg.string();
}

std::size_t count_lines(const std::string& text) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

} // namespace

TEST_CASE("generate is deterministic and validates its flags") {
    TempDir tmp;
    const std::string ds1 = (tmp.path / "a.bin").string();
    const std::string ds2 = (tmp.path / "b.bin").string();

    REQUIRE(run("generate --count 20 --seed 1 --out " + ds1) == 0);
    REQUIRE(run("generate --count 20 --seed 1 --out " + ds2) == 0);
    CHECK(slurp(ds1) == slurp(ds2));
    CHECK(slurp(ds1).size() > 0);

    CHECK(run("generate --count 0 --out " + (tmp.path / "c.bin").string()) == 2);
    CHECK(run("generate --out " + (tmp.path / "d.bin").string()) == 2); // missing count
    CHECK(run("definitely-not-a-command") == 2);
    CHECK(run("--help") == 0);
}

TEST_CASE("cli pipeline runs end to end at a tiny scale") {
    TempDir tmp;
    const std::string cfg = write_tiny_config(tmp.path);
    const std::string train_ds = (tmp.path / "train.bin").string();
    const std::string test_ds = (tmp.path / "test.bin").string();
    const std::string model = (tmp.path / "model.bin").string();

    REQUIRE(run("generate --count 64 --seed 2 --config " + cfg + " --out " + train_ds) == 0);
    REQUIRE(run("generate --count 16 --seed 3 --config " + cfg + " --out " + test_ds) == 0);

    SECTION("train writes a checkpoint, sidecar, and loss metrics") {
        REQUIRE(run("train --dataset " + train_ds + " --out-model " + model +
                    " --config " + cfg + " --threads 2") == 0);
        CHECK(fs::exists(model));
        CHECK(fs::exists(model + ".json"));
        const std::string loss_csv = slurp(model + ".loss.csv");
        CHECK(loss_csv.starts_with("epoch,loss\n"));
        CHECK(count_lines(loss_csv) == 1 + 2); // header + one row per epoch

        SECTION("training twice yields an identical checkpoint") {
            const std::string model2 = (tmp.path / "model2.bin").string();
            REQUIRE(run("train --dataset " + train_ds + " --out-model " + model2 +
                        " --config " + cfg + " --threads 1") == 0);
            CHECK(slurp(model) == slurp(model2));
        }

        SECTION("evaluate emits schema-stable CSV outputs") {
            const std::string out_dir = (tmp.path / "eval").string();
            REQUIRE(run("evaluate --model " + model + " --dataset " + test_ds +
                        " --out-dir " + out_dir) == 0);
            const std::string curve = slurp(fs::path(out_dir) / "error_curve.csv");
            CHECK(curve.starts_with("t,error,error_normalized\n"));
            CHECK(count_lines(curve) == 1 + 21);
            const std::string traj = slurp(fs::path(out_dir) / "trajectories.csv");
            CHECK(traj.starts_with("record_id,t,B_true,B_est\n"));
            CHECK(count_lines(traj) == 1 + 2 * 21);
        }

        SECTION("compare emits the summary and is deterministic") {
            const std::string out1 = (tmp.path / "cmp1").string();
            const std::string out2 = (tmp.path / "cmp2").string();
            REQUIRE(run("compare --model " + model + " --dataset " + test_ds +
                        " --out-dir " + out1) == 0);
            REQUIRE(run("compare --model " + model + " --dataset " + test_ds +
                        " --out-dir " + out2 + " --threads 1") == 0);
            const std::string summary = slurp(fs::path(out1) / "compare_summary.csv");
            CHECK(summary.starts_with("key,value\n"));
            CHECK(summary.find("ratio_rnn_to_smoother") != std::string::npos);
            CHECK(summary.find("edge_ratio_start_smoothed") != std::string::npos);
            CHECK(summary.find("teacher_mse") != std::string::npos);
            CHECK(summary == slurp(fs::path(out2) / "compare_summary.csv"));
            const std::string curves = slurp(fs::path(out1) / "compare_curves.csv");
            CHECK(curves.starts_with(
                "t,error_rnn,error_smoothed,error_filtered,"
                "error_rnn_normalized,error_smoothed_normalized\n"));
        }
    }

    SECTION("baseline writes the smoother curve") {
        const std::string out_csv = (tmp.path / "baseline.csv").string();
        REQUIRE(run("baseline --dataset " + test_ds + " --out " + out_csv +
                    " --record-csv " + (tmp.path / "rec.csv").string()) == 0);
        const std::string text = slurp(out_csv);
        CHECK(text.starts_with("t,error_smoothed,error_filtered\n"));
        CHECK(count_lines(text) == 1 + 21);
        CHECK(slurp(tmp.path / "rec.csv")
                  .starts_with("t,B_true,B_smoothed,B_var_smoothed\n"));
    }
}

TEST_CASE("cli error paths use the documented exit codes") {
    TempDir tmp;
    CHECK(run("train --dataset " + (tmp.path / "missing.bin").string() +
              " --out-model " + (tmp.path / "m.bin").string()) == 2);
    CHECK(run("evaluate --model " + (tmp.path / "nope.bin").string() +
              " --dataset " + (tmp.path / "missing.bin").string()) == 2);

    // a malformed config is a usage error
    const fs::path bad_cfg = tmp.path / "bad.json";
    std::ofstream(bad_cfg) << "{ not json";
    CHECK(run("generate --count 3 --config " + bad_cfg.string() + " --out " +
              (tmp.path / "x.bin").string()) == 2);

    // a corrupted dataset is a format error, still exit 2
    const fs::path corrupt = tmp.path / "corrupt.bin";
    std::ofstream(corrupt, std::ios::binary) << "XXXXGARBAGE";
    CHECK(run("baseline --dataset " + corrupt.string() + " --out " +
              (tmp.path / "b.csv").string()) == 2);

    // numeric divergence exits 3
    const std::string cfg = write_tiny_config(tmp.path, 1e300);
    const std::string ds = (tmp.path / "train.bin").string();
    REQUIRE(run("generate --count 32 --seed 4 --config " + cfg + " --out " + ds) == 0);
    CHECK(run("train --dataset " + ds + " --out-model " +
              (tmp.path / "m.bin").string() + " --config " + cfg) == 3);
}
