package fixtures.wildcard;

import com.google.gson.*;
import java.util.*;

public class Wildcard {
    public JsonElement wrap(List<String> values) {
        JsonArray array = new JsonArray(); //@use com.google.gson.JsonArray.<init>/0
        for (String v : values) {
            array.add(v); //@use com.google.gson.JsonArray.add/1
        }
        Map<String, String> seen = new HashMap<>();
        seen.put("n", "1");
        return array;
    }
}
