#include <doctest.h>

#include <cstdlib>
#include <string>

#include "test_support.hpp"

using testsupport::TempDir;
using testsupport::data_path;
using testsupport::read_file;
using testsupport::write_file;

namespace {

const std::string kBin = ASRSIM_CLI_PATH;

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

RunResult run(const std::string& args) {
  TempDir tmp;
  std::string out_path = tmp.file("stdout");
  std::string err_path = tmp.file("stderr");
  std::string cmd = kBin + " " + args + " >" + out_path + " 2>" + err_path;
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out_path);
  r.err = read_file(err_path);
  return r;
}

std::string digest_of(const std::string& stderr_text) {
  auto pos = stderr_text.find("config_digest=");
  REQUIRE(pos != std::string::npos);
  auto end = stderr_text.find('\n', pos);
  return stderr_text.substr(pos + 14, end - pos - 14);
}

std::string fixture_args() {
  return "--vectors " + data_path("toy_vectors.txt") + " --cmudict " +
         data_path("cmudict_subset.dict") + " --features " + data_path("hayes_features.csv");
}

}  // namespace

TEST_CASE("validate succeeds on the shipped fixtures") {
  RunResult r = run("validate " + fixture_args());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("eligible_vocabulary=") != std::string::npos);
  CHECK(r.out.find("missing_phonemes=\n") != std::string::npos);
}

TEST_CASE("missing required option is a usage error with exit 2") {
  RunResult r = run("corrupt --in somewhere.txt --wer 0.1 --out out.txt");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK(r.err.find("--table") != std::string::npos);
}

TEST_CASE("unknown flags are rejected") {
  RunResult r = run("validate " + fixture_args() + " --frobnicate");
  CHECK(r.exit_code == 2);
}

TEST_CASE("config digest is invariant under flag order") {
  TempDir tmp;
  std::string t1 = tmp.file("a.tbl");
  std::string t2 = tmp.file("b.tbl");
  std::string base = " --corpus " + data_path("fixture_corpus.txt") +
                     " --top-n 20 --thresh 6.0 --workers 1";
  RunResult r1 = run("subst-table build " + fixture_args() + base + " --out " + t1);
  RunResult r2 = run("subst-table build --thresh 6.0 --out " + t2 + " --top-n 20 --corpus " +
                     data_path("fixture_corpus.txt") + " --workers 1 " + fixture_args());
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  // Identical parameters in any order, except the output path itself.
  std::string d1 = r1.err;
  std::string d2 = r2.err;
  d1.erase(d1.find("[asrsim] out="), d1.find('\n', d1.find("[asrsim] out=")) + 1 -
                                         d1.find("[asrsim] out="));
  d2.erase(d2.find("[asrsim] out="), d2.find('\n', d2.find("[asrsim] out=")) + 1 -
                                         d2.find("[asrsim] out="));
  auto strip_digest = [](std::string s) {
    auto pos = s.find("config_digest=");
    return s.substr(0, pos);
  };
  CHECK(strip_digest(d1) == strip_digest(d2));

  // And with identical --out, the digests themselves match.
  RunResult r3 = run("subst-table build " + fixture_args() + base + " --out " + t1);
  RunResult r4 = run("subst-table build --top-n 20 " + fixture_args() + " --thresh 6.0 --out " +
                     t1 + " --workers 1 --corpus " + data_path("fixture_corpus.txt"));
  CHECK(digest_of(r3.err) == digest_of(r4.err));
}

TEST_CASE("table build output is byte-identical across worker counts") {
  TempDir tmp;
  std::string t1 = tmp.file("w1.tbl");
  std::string t8 = tmp.file("w8.tbl");
  std::string base = " --corpus " + data_path("fixture_corpus.txt") + " --top-n 30 --thresh 6.0";
  REQUIRE(run("subst-table build " + fixture_args() + base + " --workers 1 --out " + t1)
              .exit_code == 0);
  REQUIRE(run("subst-table build " + fixture_args() + base + " --workers 8 --out " + t8)
              .exit_code == 0);
  CHECK(read_file(t1) == read_file(t8));
}

TEST_CASE("corrupt is reproducible and --records audits the run") {
  TempDir tmp;
  std::string table = tmp.file("t.tbl");
  REQUIRE(run("subst-table build " + fixture_args() + " --corpus " +
              data_path("fixture_corpus.txt") + " --top-n 40 --thresh 6.0 --out " + table)
              .exit_code == 0);
  std::string o1 = tmp.file("c1.txt");
  std::string o2 = tmp.file("c2.txt");
  std::string rec = tmp.file("r.tsv");
  std::string corrupt_base = "corrupt --table " + table + " --in " +
                             data_path("fixture_corpus.txt") + " --wer 0.3 --seed 42 --out ";
  REQUIRE(run(corrupt_base + o1 + " --records " + rec).exit_code == 0);
  REQUIRE(run(corrupt_base + o2).exit_code == 0);
  CHECK(read_file(o1) == read_file(o2));
  std::string records = read_file(rec);
  CHECK(records.rfind("sentence_index\ttoken_index\toriginal\treplacement\tprobability\n", 0) ==
        0);
}

TEST_CASE("config file supplies defaults and flags win") {
  TempDir tmp;
  std::string cfg = tmp.file("run.ini");
  std::string t = tmp.file("t.tbl");
  write_file(cfg,
             "[subst-table.build]\n"
             "top-n=20\n"
             "thresh=2.0\n");
  std::string args = "--config " + cfg + " subst-table build " + fixture_args() +
                     " --corpus " + data_path("fixture_corpus.txt") + " --thresh 6.0 --out " + t;
  RunResult r = run(args);
  REQUIRE(r.exit_code == 0);
  // top-n came from the config file, thresh from the command line.
  CHECK(r.err.find("n_semantic=20") != std::string::npos);
  CHECK(r.err.find("thresh=6\n") != std::string::npos);
}

TEST_CASE("phono-debug prints a DP matrix without building") {
  RunResult r = run("subst-table build --cmudict " + data_path("cmudict_subset.dict") +
                    " --features " + data_path("hayes_features.csv") +
                    " --phono-debug read red");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("word_distance=0") != std::string::npos);
}

TEST_CASE("full pipeline: sweep and sts produce the documented schemas") {
  TempDir tmp;
  std::string table = tmp.file("t.tbl");
  REQUIRE(run("subst-table build " + fixture_args() + " --corpus " +
              data_path("fixture_corpus.txt") + " --corpus " + data_path("sts_fixture.tsv") +
              " --top-n 60 --thresh 6.0 --out " + table)
              .exit_code == 0);

  std::string sweep_csv = tmp.file("sweep.csv");
  RunResult sweep = run("sweep --table " + table + " --vectors " + data_path("toy_vectors.txt") +
                        " --corpus " + data_path("fixture_corpus.txt") +
                        " --methods avg,sif --wer-grid 0,30 --seed 42 --stopwords " +
                        data_path("stopwords.txt") + " --out " + sweep_csv);
  REQUIRE(sweep.exit_code == 0);
  std::string csv = read_file(sweep_csv);
  CHECK(csv.rfind("method,wer,mean_self_similarity,n_sentences,n_excluded,seed,config_digest\n",
                  0) == 0);
  CHECK(csv.find("avg,0,1,") != std::string::npos);

  std::string sts_csv = tmp.file("sts.csv");
  RunResult sts = run("sts --dataset sick --file " + data_path("sts_fixture.tsv") + " --table " +
                      table + " --vectors " + data_path("toy_vectors.txt") +
                      " --method avg --wer 0 --wer 0.3 --seed 42 --out " + sts_csv);
  REQUIRE(sts.exit_code == 0);
  std::string sts_out = read_file(sts_csv);
  CHECK(sts_out.rfind("method,dataset,split,wer,", 0) == 0);
  CHECK(sts_out.find("avg,sick,pooled,0,") != std::string::npos);
  CHECK(sts_out.find("avg,sick,pooled,0.3,") != std::string::npos);
}

TEST_CASE("sts --repeats reports mean and spread over seeds") {
  TempDir tmp;
  std::string table = tmp.file("t.tbl");
  REQUIRE(run("subst-table build " + fixture_args() + " --corpus " +
              data_path("fixture_corpus.txt") + " --corpus " + data_path("sts_fixture.tsv") +
              " --top-n 60 --thresh 6.0 --out " + table)
              .exit_code == 0);
  std::string csv = tmp.file("sts.csv");
  RunResult r = run("sts --dataset sick --file " + data_path("sts_fixture.tsv") + " --table " +
                    table + " --vectors " + data_path("toy_vectors.txt") +
                    " --method avg --wer 0.3 --seed 42 --repeats 3 --out " + csv);
  REQUIRE(r.exit_code == 0);
  // Row shape: ...,n_pairs,n_excluded,repeats,pcc_sd,...
  std::string content = read_file(csv);
  auto pos = content.find("avg,sick,pooled,0.3,");
  REQUIRE(pos != std::string::npos);
  std::string row = content.substr(pos, content.find('\n', pos) - pos);
  auto fields = [&] {
    std::vector<std::string> out;
    std::string cur;
    for (char c : row) {
      if (c == ',') {
        out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    out.push_back(cur);
    return out;
  }();
  REQUIRE(fields.size() == 13);
  CHECK(fields[9] == "3");             // repeats
  CHECK(std::stod(fields[10]) > 0.0);  // sd across three seeds
}

TEST_CASE("embed writes TSV vectors usable as external embeddings") {
  TempDir tmp;
  std::string vecs = tmp.file("vecs.tsv");
  RunResult r = run("embed --method avg --vectors " + data_path("toy_vectors.txt") + " --in " +
                    data_path("fixture_corpus.txt") + " --out " + vecs);
  REQUIRE(r.exit_code == 0);
  std::string content = read_file(vecs);
  CHECK(content.rfind("0\t", 0) == 0);

  // --a on a non-SIF method warns and is ignored.
  RunResult warn = run("embed --method avg --a 0.5 --vectors " + data_path("toy_vectors.txt") +
                       " --in " + data_path("fixture_corpus.txt") + " --out " + vecs);
  CHECK(warn.exit_code == 0);
  CHECK(warn.err.find("warning") != std::string::npos);
}
