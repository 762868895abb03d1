// Copyright 2026 The zfolio Authors.
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

#ifndef ZF_PERSISTENCE_H_
#define ZF_PERSISTENCE_H_

#include <iosfwd>
#include <string>

#include "zf/hierarchy.h"
#include "zf/learning.h"
#include "zf/portfolio.h"

namespace zf {

// Versioned JSON documents. Doubles are written in shortest round-trip
// form, so reloaded models predict bit-identically. Malformed documents
// throw PortfolioError::kFormat.
inline constexpr const char* kPortfolioFormat = "zfolio-portfolio/1";
inline constexpr const char* kRidgeFormat = "zfolio-ridge/1";
inline constexpr const char* kHierarchicalFormat = "zfolio-hierarchical/1";

void write_ridge_model(const RidgeModel& model, std::ostream& out);
RidgeModel read_ridge_model(std::istream& in);

void write_hierarchical_model(const HierarchicalModel& model, std::ostream& out);
HierarchicalModel read_hierarchical_model(std::istream& in);

void write_portfolio(const PortfolioConfig& portfolio, std::ostream& out);
PortfolioConfig read_portfolio(std::istream& in);

void write_portfolio_file(const PortfolioConfig& portfolio, const std::string& path);
PortfolioConfig read_portfolio_file(const std::string& path);

}  // namespace zf

#endif  // ZF_PERSISTENCE_H_
