#ifndef DELIB_HPP_
#define DELIB_HPP_

#include "delib/clustering.hpp"
#include "delib/compare.hpp"
#include "delib/csv.hpp"
#include "delib/digest.hpp"
#include "delib/engine.hpp"
#include "delib/error.hpp"
#include "delib/evolution.hpp"
#include "delib/ingest.hpp"
#include "delib/metrics.hpp"
#include "delib/pipeline.hpp"
#include "delib/providers.hpp"
#include "delib/remote_providers.hpp"
#include "delib/segmentation.hpp"
#include "delib/serialize.hpp"
#include "delib/service.hpp"
#include "delib/stats.hpp"
#include "delib/store.hpp"
#include "delib/text.hpp"
#include "delib/types.hpp"
#include "delib/vector_ops.hpp"

#endif  // DELIB_HPP_
