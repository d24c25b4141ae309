from .schema import (
    Attribute, AttributeSchema, SchemaError,
    KIND_NUMERIC, KIND_CATEGORICAL, KIND_MACRO,
    cn_listing_schema, us_listing_schema,
)
from .records import (
    HouseRecord, RecordError, DEEP_FEATURE_DIM, NUM_VIEWS,
    load_records, write_records, load_deep_features, write_deep_features,
)
from .scaling import MinMaxScaler, ScalerError, fit_minmax
from .encoding import (
    Split, split, encoded_columns, one_hot_encode, one_hot_decode,
    EncodedDataset, encode_dataset, PRICE_RANGE,
)
from .images import read_ppm, write_ppm, resize_bilinear, tile_views, load_images
from .synth import SyntheticDataset, synth_generate, synth_schema, write_dataset
