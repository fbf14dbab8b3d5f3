#pragma once

#include "sshdx/error.hpp"
#include "sshdx/bits.hpp"
#include "sshdx/linalg.hpp"
#include "sshdx/util.hpp"
#include "sshdx/codes.hpp"
#include "sshdx/groups.hpp"
#include "sshdx/graph.hpp"
#include "sshdx/lr_complex.hpp"
#include "sshdx/chain.hpp"
#include "sshdx/xor.hpp"
#include "sshdx/refute.hpp"
#include "sshdx/pipeline.hpp"
