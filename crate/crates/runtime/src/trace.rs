use serde::Serialize;

/// One published event, as written to trace files.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TraceRecord {
    pub ts: u64,
    pub producer: String,
    pub channel: String,
    pub seq: u64,
}

impl TraceRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace records always serialize")
    }
}

/// One event handed to a consumer, in the consumer's observed order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeliveryRecord {
    pub consumer: String,
    pub producer: String,
    pub channel: String,
    pub seq: u64,
}
