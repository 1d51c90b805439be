package fixtures.lambda;

import java.util.List;
import java.util.stream.Collectors;

import com.google.gson.JsonElement;
import com.google.gson.JsonPrimitive;

public class Lambda {
    public List<JsonElement> wrap(List<String> values) {
        return values.stream()
            .map(v -> new JsonPrimitive(v)) //@use com.google.gson.JsonPrimitive.<init>/1
            .collect(Collectors.toList());
    }

    public List<String> unwrap(List<JsonElement> elements) {
        return elements.stream().map(e -> e.getAsString()).collect(Collectors.toList()); //@use com.google.gson.JsonElement.getAsString/0
    }
}
