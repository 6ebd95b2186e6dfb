#pragma once

#include "ctxkit/analyze.hpp"
#include "ctxkit/context.hpp"
#include "ctxkit/error.hpp"
#include "ctxkit/exgraph.hpp"
#include "ctxkit/io.hpp"
#include "ctxkit/philox.hpp"
#include "ctxkit/quantum.hpp"
#include "ctxkit/sdp.hpp"
#include "ctxkit/simulate.hpp"
#include "ctxkit/table.hpp"
#include "ctxkit/theta.hpp"
