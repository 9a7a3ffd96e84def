#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

std::string cli_bin() {
    const char* env = std::getenv("LLMVOX_BIN");
    REQUIRE_MESSAGE(env != nullptr, "LLMVOX_BIN must point at the llmvox binary");
    return env;
}

int run(const std::string& args, const std::string& stderr_file = "") {
    std::string cmd = cli_bin() + " " + args + " > /dev/null";
    cmd += stderr_file.empty() ? " 2> /dev/null" : " 2> " + stderr_file;
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

// tiny model/codec so every CLI invocation stays fast
const std::string kDims =
    "--n-layer 1 --n-head 2 --block-size 64 --text-dim 16 --feature-dim 16 "
    "--vocab-size 64 --sample-rate 2400 --tokens-per-second 40";

struct Workspace {
    fs::path dir;
    explicit Workspace(const std::string& name) : dir(fs::path("cli_ws") / name) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    std::string str() const { return dir.string(); }
};

void make_checkpoint(const Workspace& ws) {
    REQUIRE(run("gen-corpus --out-dir " + ws.str() + " --out corpus.tsv --pairs 4 --min-words 1 --max-words 2 " +
                "--min-tokens 8 --max-tokens 12 --seed 5 " + kDims) == 0);
    REQUIRE(run("train --corpus " + ws.str() + "/corpus.tsv --out-dir " + ws.str() +
                " --out model.ckpt --steps 10 --batch 2 --seed 5 " + kDims) == 0);
}

}  // namespace

TEST_CASE("gen-corpus is deterministic and writes a meta sidecar") {
    Workspace a("gen_a"), b("gen_b");
    const std::string args = "gen-corpus --out corpus.tsv --pairs 6 --seed 11 --vocab-size 64";
    CHECK(run(args + " --out-dir " + a.str()) == 0);
    CHECK(run(args + " --out-dir " + b.str()) == 0);
    CHECK(slurp(a.dir / "corpus.tsv") == slurp(b.dir / "corpus.tsv"));
    CHECK(slurp(a.dir / "corpus.tsv.meta") == slurp(b.dir / "corpus.tsv.meta"));
}

TEST_CASE("train writes checkpoint plus loss curve; reruns are bit-identical") {
    Workspace a("train_a"), b("train_b");
    for (const auto* ws : {&a, &b}) {
        REQUIRE(run("gen-corpus --out-dir " + ws->str() + " --out corpus.tsv --pairs 4 --min-words 1 --max-words 2 "
                    "--min-tokens 8 --max-tokens 12 --seed 7 " + kDims) == 0);
        REQUIRE(run("train --corpus " + ws->str() + "/corpus.tsv --out-dir " + ws->str() +
                    " --out model.ckpt --steps 12 --batch 2 --seed 7 " + kDims) == 0);
    }
    CHECK(fs::exists(a.dir / "model.ckpt"));
    CHECK(fs::exists(a.dir / "model.ckpt.cfg"));
    CHECK(fs::exists(a.dir / "model.ckpt.meta"));
    CHECK(slurp(a.dir / "model.ckpt.loss.csv") == slurp(b.dir / "model.ckpt.loss.csv"));
    CHECK(slurp(a.dir / "model.ckpt") == slurp(b.dir / "model.ckpt"));
}

TEST_CASE("train with a missing corpus exits 2 without artifacts") {
    Workspace ws("train_missing");
    CHECK(run("train --corpus " + ws.str() + "/nope.tsv --out-dir " + ws.str() + " --out model.ckpt") == 2);
    CHECK(!fs::exists(ws.dir / "model.ckpt"));
}

TEST_CASE("corpus parse errors exit 2 and name the line") {
    Workspace ws("train_badcorpus");
    {
        std::ofstream f(ws.dir / "bad.tsv");
        f << "fine\t1,2,3\n";
        f << "broken line without tab\n";
    }
    const std::string err = (ws.dir / "err.txt").string();
    CHECK(run("train --corpus " + ws.str() + "/bad.tsv --out-dir " + ws.str() + " --out m.ckpt " + kDims, err) == 2);
    CHECK(slurp(err).find("line 2") != std::string::npos);
}

TEST_CASE("synth: duration law, determinism, empty-text rejection") {
    Workspace ws("synth");
    make_checkpoint(ws);
    REQUIRE(run("synth --ckpt " + ws.str() + "/model.ckpt --text \"hello there.\" --out-dir " + ws.str() +
                " --out a.wav --max-tokens 20") == 0);
    REQUIRE(run("synth --ckpt " + ws.str() + "/model.ckpt --text \"hello there.\" --out-dir " + ws.str() +
                " --out b.wav --max-tokens 20") == 0);
    const auto a = slurp(ws.dir / "a.wav");
    CHECK(a == slurp(ws.dir / "b.wav"));
    // data bytes = tokens * 60 samples * 2 bytes: a whole multiple per the duration law
    REQUIRE(a.size() > 44u);
    const size_t data_bytes = a.size() - 44;
    CHECK(data_bytes % (60 * 2) == 0);
    CHECK(fs::exists(ws.dir / "a.wav.meta"));

    CHECK(run("synth --ckpt " + ws.str() + "/model.ckpt --text \"  \" --out-dir " + ws.str()) == 2);
    CHECK(run("synth --ckpt " + ws.str() + "/missing.ckpt --text hi --out-dir " + ws.str()) == 2);
}

TEST_CASE("pipeline: deterministic artifacts and trace arithmetic") {
    Workspace ws("pipeline");
    make_checkpoint(ws);
    const std::string common = "pipeline --ckpt " + ws.str() + "/model.ckpt --seed 3 --clock sim " +
                               "--script \"One two three. Four five six!\" --asr-delay-ms 100 "
                               "--first-word-delay-ms 150 --words-per-second 10 --jitter-ms 0 --initial-n 8 "
                               "--max-tokens-per-sentence 24";
    Workspace run1("pipeline_r1"), run2("pipeline_r2");
    REQUIRE(run(common + " --out-dir " + run1.str()) == 0);
    REQUIRE(run(common + " --out-dir " + run2.str()) == 0);
    CHECK(slurp(run1.dir / "pipeline.wav") == slurp(run2.dir / "pipeline.wav"));
    CHECK(slurp(run1.dir / "trace.csv") == slurp(run2.dir / "trace.csv"));
    CHECK(slurp(run1.dir / "trace.csv.meta") == slurp(run2.dir / "trace.csv.meta"));

    const auto trace = slurp(run1.dir / "trace.csv");
    CHECK(trace.find("t_asr_done_ms") != std::string::npos);
    CHECK(trace.find("100.000") != std::string::npos);  // asr done
    CHECK(trace.find("250.000") != std::string::npos);  // first word
}

TEST_CASE("pipeline writes per-sentence wavs on request") {
    Workspace ws("pipeline_sent");
    make_checkpoint(ws);
    REQUIRE(run("pipeline --ckpt " + ws.str() + "/model.ckpt --clock sim --script \"Alpha one. Beta two.\" "
                "--initial-n 8 --max-tokens-per-sentence 16 --per-sentence-wavs --out-dir " +
                ws.str()) == 0);
    CHECK(fs::exists(ws.dir / "sentence_001.wav"));
    CHECK(fs::exists(ws.dir / "sentence_002.wav"));
}

TEST_CASE("sweep-chunks: one row per n, p95 equals mean for single reps") {
    Workspace ws("sweep");
    make_checkpoint(ws);
    REQUIRE(run("sweep-chunks --ckpt " + ws.str() + "/model.ckpt --n-list 4,8 --reps 1 --seed 9 "
                "--script \"Measure me now. Twice over here.\" --max-tokens-per-sentence 24 --out-dir " +
                ws.str()) == 0);
    const auto sweep = slurp(ws.dir / "sweep.csv");
    CHECK(std::count(sweep.begin(), sweep.end(), '\n') == 3);  // header + 2 rows
    // p95 column equals the mean column when reps == 1
    std::istringstream in(sweep);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string n, mean, p95;
        std::getline(row, n, ',');
        std::getline(row, mean, ',');
        std::getline(row, p95, ',');
        CHECK(mean == p95);
    }
    CHECK(fs::exists(ws.dir / "sweep_long.csv"));
    CHECK(fs::exists(ws.dir / "sweep.csv.meta"));
}

TEST_CASE("usage errors exit 2") {
    CHECK(run("definitely-not-a-command") == 2);
    CHECK(run("synth") == 2);  // missing required flags
}
