// Copyright 2026 The RRD Toolkit Authors
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

#include <gtest/gtest.h>

#include <random>

#include "rrd/url.hpp"
#include "support.hpp"

namespace {

using namespace rrd::url;

TEST(FindUrls, DocumentedExamples) {
  const auto a = find_urls("details at http://trendscenter.org/software/gift/ here");
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].matched_text, "http://trendscenter.org/software/gift/");
  EXPECT_EQ(a[0].start, 11u);
  EXPECT_EQ(a[0].end, 11u + a[0].matched_text.size());

  const auto b = find_urls("download via ftp://ftp.ncbi.nlm.nih.gov/");
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(normalize_url(b[0]).scheme, "ftp");

  EXPECT_TRUE(find_urls("no links here.").empty());
}

TEST(FindUrls, SchemeIsStrictAsciiLetters) {
  // The bracket and underscore characters sit between 'Z' and 'a' in ASCII.
  const auto spans = find_urls("x_[ftp://a.org] and 9http://b.org and ://c.org and é://d.org");
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[0].matched_text, "ftp://a.org]");
  EXPECT_EQ(spans[1].matched_text, "http://b.org");
}

TEST(FindUrls, LeftmostLongestNonOverlapping) {
  const auto spans = find_urls("ahttp://x.org/http://y.org z://  q://w");
  ASSERT_EQ(spans.size(), 3u);
  EXPECT_EQ(spans[0].matched_text, "ahttp://x.org/http://y.org");
  EXPECT_EQ(spans[1].matched_text, "z://");
  EXPECT_EQ(spans[2].matched_text, "q://w");
}

TEST(FindUrls, StopsAtUnicodeWhitespace) {
  const auto spans = find_urls("at http://x.org\xC2\xA0next and http://y.org\xE2\x80\x83z");
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[0].matched_text, "http://x.org");
  EXPECT_EQ(spans[1].matched_text, "http://y.org");
}

TEST(Normalize, SpecExamples) {
  EXPECT_EQ(normalize_url(find_urls("(see http://x.org/a).")[0]).url, "http://x.org/a");
  EXPECT_EQ(normalize_url("HTTP://X.ORG/Path").url, "http://x.org/Path");
  EXPECT_THROW(normalize_url("http://"), InvalidUrl);
}

TEST(Normalize, TrimmingRules) {
  EXPECT_EQ(normalize_url("http://x.org/a,;:!?'\"").url, "http://x.org/a");
  EXPECT_EQ(normalize_url("http://x.org/f(x)").url, "http://x.org/f(x)");
  EXPECT_EQ(normalize_url("http://x.org/f(x))").url, "http://x.org/f(x)");
  EXPECT_EQ(normalize_url("http://x.org/a].").url, "http://x.org/a");
  EXPECT_EQ(normalize_url("http://x.org/a}").url, "http://x.org/a");
  EXPECT_EQ(normalize_url("http://x.org/a).).").url, "http://x.org/a");
  EXPECT_EQ(normalize_url("http://x.org/[v]").url, "http://x.org/[v]");
  EXPECT_THROW(normalize_url("http://.)"), InvalidUrl);
  EXPECT_THROW(normalize_url("ftp:///pub"), InvalidUrl);
  EXPECT_THROW(normalize_url("http://?q=1"), InvalidUrl);
}

TEST(Normalize, CasingAndParts) {
  const auto n = normalize_url("HtTpS://User@Sub.Example.COM:8443/Path/To?Q=A#Frag");
  EXPECT_EQ(n.scheme, "https");
  EXPECT_EQ(n.host, "user@sub.example.com:8443");
  EXPECT_EQ(n.path_query, "/Path/To?Q=A#Frag");
  EXPECT_EQ(n.url, n.scheme + "://" + n.host + n.path_query);
}

TEST(Domain, DocumentedExamples) {
  EXPECT_EQ(extract_domain(normalize_url("http://trendscenter.org/software/gift/")),
            "http://trendscenter.org");
  EXPECT_EQ(extract_domain(normalize_url("https://zenodo.org/records/10526493")),
            "https://zenodo.org");
  EXPECT_EQ(extract_domain(normalize_url("ftp://a.b/c")), "ftp://a.b");
}

// Every L + "://" + N (L ASCII letters, N non-whitespace) is detected whole.
TEST(Properties, RegexFidelityOverGeneratedStrings) {
  std::mt19937_64 rng(11);
  const std::string letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::string printable;
  for (char c = '!'; c <= '~'; ++c) printable += c;
  for (int i = 0; i < 5000; ++i) {
    std::string scheme;
    for (std::size_t k = 0, n = 1 + rng() % 8; k < n; ++k) scheme += letters[rng() % letters.size()];
    std::string rest;
    for (std::size_t k = 0, n = 1 + rng() % 30; k < n; ++k) {
      rest += rng() % 20 == 0 ? std::string("é") : std::string(1, printable[rng() % printable.size()]);
    }
    const std::string url = scheme + "://" + rest;
    const std::string prefix = rng() % 2 ? "word " : "";
    const std::string text = prefix + url + (rng() % 2 ? " tail" : "");
    const auto spans = find_urls(text);
    ASSERT_FALSE(spans.empty()) << text;
    EXPECT_EQ(spans[0].matched_text, url) << text;
    EXPECT_EQ(spans[0].start, prefix.size());
    EXPECT_EQ(rrd::testing::oracle_find_urls(text).front(), url);
  }
}

TEST(Properties, NormalizeIdempotentAndDomainIsPrefix) {
  rrd::testing::CorpusGenerator gen(12);
  std::mt19937_64& rng = gen.rng();
  const std::string tails[] = {"", ".", ",", ")", ").", "\"", "]", "?!", "'"};
  for (int i = 0; i < 5000; ++i) {
    const std::string raw = gen.random_url() + tails[rng() % std::size(tails)];
    const auto once = try_normalize(raw);
    ASSERT_TRUE(once) << raw;
    const auto twice = normalize_url(once->url);
    EXPECT_EQ(twice, *once);
    const auto domain = extract_domain(*once);
    EXPECT_EQ(once->url.rfind(domain, 0), 0u);
    EXPECT_EQ(domain.find('/', domain.find("://") + 3), std::string::npos);
    EXPECT_EQ(rrd::testing::oracle_normalize(raw), once->url);
  }
}

}  // namespace
