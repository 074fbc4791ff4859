// Copyright 2026 The seqauction Authors.
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


#ifndef SEQAUCTION_SEQAUCTION_HPP_
#define SEQAUCTION_SEQAUCTION_HPP_

#include "seqauction/audit.hpp"
#include "seqauction/benchmark.hpp"
#include "seqauction/common.hpp"
#include "seqauction/distribution.hpp"
#include "seqauction/mechanism.hpp"
#include "seqauction/numerics.hpp"
#include "seqauction/order_stats.hpp"
#include "seqauction/pay_your_bid.hpp"
#include "seqauction/revenue.hpp"
#include "seqauction/rng.hpp"
#include "seqauction/second_stage.hpp"
#include "seqauction/simulation.hpp"
#include "seqauction/third_price.hpp"

#endif  // SEQAUCTION_SEQAUCTION_HPP_
