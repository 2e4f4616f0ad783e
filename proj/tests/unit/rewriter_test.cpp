/*
 * Copyright 2026 MVRAG Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mvrag/rewriter.hpp"

#include <random>

#include "doctest.h"
#include "mvrag/error.hpp"
#include "test_support.hpp"

using namespace mvrag;

namespace {

Perspective named(int id, const std::string& label) {
  Perspective p;
  p.id = id;
  p.label = label;
  return p;
}

PerspectiveSet set_of(const std::vector<std::string>& labels) {
  PerspectiveSet set;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    set.perspectives.push_back(named(static_cast<int>(i), labels[i]));
  }
  return set;
}

PerspectiveVector active_all(std::size_t n) {
  PerspectiveVector vq;
  vq.weights.assign(n, 0.5);
  return vq;
}

}  // namespace

TEST_CASE("build_rewrite_prompt renders the template") {
  const std::string prompt = build_rewrite_prompt(
      "chest pain", {named(0, "Symptoms"), named(1, "Medical History"),
                     named(2, "Treatment Response")});
  CHECK(prompt.find("You are a domain expert specializing in analyzing and "
                    "rewriting queries") == 0);
  CHECK(prompt.find("Input Query: chest pain") != std::string::npos);
  CHECK(prompt.find("List of Perspectives: Symptoms, Medical History, "
                    "Treatment Response") != std::string::npos);
  CHECK(prompt.find("Generated Pseudo-Answer Document:") != std::string::npos);
  const auto s1 = prompt.find("1. Symptoms:");
  const auto s2 = prompt.find("2. Medical History:");
  const auto s3 = prompt.find("3. Treatment Response:");
  REQUIRE(s1 != std::string::npos);
  REQUIRE(s2 != std::string::npos);
  REQUIRE(s3 != std::string::npos);
  CHECK(s1 < s2);
  CHECK(s2 < s3);

  // deterministic
  CHECK(prompt == build_rewrite_prompt("chest pain",
                                       {named(0, "Symptoms"),
                                        named(1, "Medical History"),
                                        named(2, "Treatment Response")}));
  CHECK_THROWS_AS(build_rewrite_prompt("q", {}), InvalidArgumentError);
}

TEST_CASE("mock rewrite fills every active section deterministically") {
  const PerspectiveSet set = set_of({"Symptoms", "Lifestyle"});
  PerspectiveVector vq;
  vq.weights = {0.8, 0.0};  // only Symptoms active

  RewriterConfig config;  // mock by default
  const RewriteSet rewrites = rewrite("chest pain", vq, set, config);
  REQUIRE(rewrites.entries.size() == 1);
  CHECK(rewrites.entries[0].perspective_id == 0);
  CHECK(rewrites.entries[0].content == "Symptoms :: chest pain :: symptoms");
  CHECK_FALSE(rewrites.entries[0].used_fallback);
  CHECK(rewrites.prompt.find("1. Symptoms:") != std::string::npos);

  const RewriteSet again = rewrite("chest pain", vq, set, config);
  CHECK(again.raw_output == rewrites.raw_output);
}

TEST_CASE("rewrite produces one entry per active perspective") {
  const PerspectiveSet set = set_of({"A", "B", "C", "D"});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  RewriterConfig config;
  for (int trial = 0; trial < 30; ++trial) {
    PerspectiveVector vq;
    vq.weights.resize(4);
    int active = 0;
    for (auto& w : vq.weights) {
      w = uniform(rng) < 0.5 ? 0.0 : uniform(rng);
      if (w != 0.0) ++active;
    }
    if (active == 0) {
      CHECK_THROWS_AS(rewrite("q", vq, set, config), InvalidArgumentError);
      continue;
    }
    const RewriteSet rewrites = rewrite("q", vq, set, config);
    CHECK(static_cast<int>(rewrites.entries.size()) == active);
    for (const auto& entry : rewrites.entries) {
      CHECK_FALSE(entry.content.empty());
    }
  }
}

TEST_CASE("per-perspective call mode issues separate prompts") {
  const PerspectiveSet set = set_of({"Basic Fact", "Penalty"});
  PerspectiveVector vq;
  vq.weights = {0.6, 0.4};
  RewriterConfig config;
  config.per_perspective_calls = true;
  const RewriteSet rewrites = rewrite("theft case", vq, set, config);
  REQUIRE(rewrites.entries.size() == 2);
  CHECK(rewrites.entries[0].content ==
        "Basic Fact :: theft case :: basic fact");
  CHECK(rewrites.entries[1].content == "Penalty :: theft case :: penalty");
  // two separate prompts were sent
  CHECK(rewrites.prompt.find("---") != std::string::npos);
}

TEST_CASE("parser extracts section bodies from a hand-written transcript") {
  const std::string transcript =
      "Generated Pseudo-Answer Document:\n"
      "1. Basic Fact: The defendant borrowed money\n"
      "and never returned it.\n"
      " 2.  Focus of Dispute :   Whether intent to defraud existed.\n"
      "3. Penalty: Up to five years.\n"
      "Closing remark that belongs to Penalty.\n";
  const std::vector<std::string> labels = {"Basic Fact", "Focus of Dispute",
                                           "Penalty"};
  std::vector<bool> missing;
  const auto sections = parse_rewrite_sections(transcript, labels, &missing);
  REQUIRE(sections.size() == 3);
  CHECK(sections[0] ==
        "The defendant borrowed money\nand never returned it.");
  CHECK(sections[1] == "Whether intent to defraud existed.");
  CHECK(sections[2] == "Up to five years.\nClosing remark that belongs to Penalty.");
  CHECK(missing == std::vector<bool>{false, false, false});
}

TEST_CASE("parser flags missing sections") {
  const std::string transcript =
      "1. Alpha: body a\n"
      "3. Gamma: body c\n";
  std::vector<bool> missing;
  const auto sections =
      parse_rewrite_sections(transcript, {"Alpha", "Beta", "Gamma"}, &missing);
  CHECK(sections[0] == "body a");
  CHECK(sections[1].empty());
  CHECK(sections[2] == "body c");
  CHECK(missing == std::vector<bool>{false, true, false});
}

TEST_CASE("parsing inverts prompt structure on random section bodies") {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> n_sections(1, 5);
  std::uniform_int_distribution<int> n_lines(1, 3);
  std::uniform_int_distribution<int> n_words(1, 6);
  const std::vector<std::string> words = {"focus",  "dispute", "penalty",
                                          "basic",  "fact",    "treatment",
                                          "remedy", "contract"};
  std::uniform_int_distribution<std::size_t> word(0, words.size() - 1);

  for (int trial = 0; trial < 200; ++trial) {
    const int n = n_sections(rng);
    std::vector<std::string> labels;
    std::vector<std::string> bodies;
    std::string transcript;
    for (int s = 0; s < n; ++s) {
      labels.push_back("Perspective " + std::to_string(s));
      std::string body;
      const int lines = n_lines(rng);
      for (int l = 0; l < lines; ++l) {
        if (l) body += "\n";
        const int count = n_words(rng);
        for (int w = 0; w < count; ++w) {
          if (w) body += " ";
          body += words[word(rng)];
        }
      }
      bodies.push_back(body);
      transcript += std::to_string(s + 1) + ". " + labels.back() + ": " +
                    body + "\n";
    }
    std::vector<bool> missing;
    const auto sections = parse_rewrite_sections(transcript, labels, &missing);
    for (int s = 0; s < n; ++s) {
      CHECK_FALSE(missing[s]);
      CHECK(sections[s] == bodies[s]);
    }
  }
}

TEST_CASE("labels with regex metacharacters are matched literally") {
  const std::string transcript = "1. Cost (Net): twelve\n";
  const auto sections = parse_rewrite_sections(transcript, {"Cost (Net)"});
  CHECK(sections[0] == "twelve");
}
